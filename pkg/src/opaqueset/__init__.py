"""Verification and quantitative audit of opaque sets (barriers) for convex polygons."""
from .bounds import AuditConfig, AuditReport, audit, crofton_energy, lemma1_residual, lemma4_check, \
    proposition_square, theorem_certificate
from .constructions import SceneSpec, random_scene
from .errors import (
    DomainMismatchError, InconsistentSceneError, OpaqueSetError, ParameterError, PreconditionError,
    SceneFormatError, ValidationError,
)
from .geometry import ConvexPolygon, Interval, Segment, SegmentSet
from .measures import AngularMeasure, h_minus2_distance, measure_of_boundary, measure_of_segments
from .opacity import OpacityCertificate, verify
from .optimizer import SearchConfig, shorten
from .shadows import l2_gap, sample_profile, shadow_f, shadow_g

__version__ = "0.1.0"
