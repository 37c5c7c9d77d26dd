"""Multi-focus reflectarray synthesis and learned sidelobe suppression."""

from ris_lab.geometry import AngularGrid, ArrayConfig, Direction, angular_distance
from ris_lab.synthesis import ReflectionProfile, quantize, single_focus_profile, superpose
from ris_lab.farfield import FarFieldPattern, pattern, pattern_reference
from ris_lab.analysis import BeamSet, SidelobeSet, detect_sidelobes, objective

__all__ = [
    "AngularGrid",
    "ArrayConfig",
    "BeamSet",
    "Direction",
    "FarFieldPattern",
    "ReflectionProfile",
    "SidelobeSet",
    "angular_distance",
    "detect_sidelobes",
    "objective",
    "pattern",
    "pattern_reference",
    "quantize",
    "single_focus_profile",
    "superpose",
]

__version__ = "0.1.0"
