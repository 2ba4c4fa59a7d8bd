"""flatlab: translation-surface dynamics at desk scale.

Core objects are translation surfaces built from glued polygons (or
square-tiled permutation pairs), their relative/absolute homology, horizontal
cylinder decompositions with twist classes, the SL(2,R) action with tremor
deformations, homology cocycles over origami Veech groups, a suspension-bundle
cocycle simulator, exact cyclotomic arithmetic checks, and an experiment
harness for twist-torus equidistribution studies.
"""

__version__ = "0.1.0"

from .surface import (
    Polygon,
    Origami,
    StratumSignature,
    TranslationSurface,
    build_regular_2ngon,
    build_origami,
    stratum,
    validate,
)

__all__ = [
    "Polygon",
    "Origami",
    "StratumSignature",
    "TranslationSurface",
    "build_regular_2ngon",
    "build_origami",
    "stratum",
    "validate",
]
