"""Monoid presentations: word problems, Tietze transformations and a model structure on presentations."""

from .calculus import (
    JMorphism,
    TietzeTrace,
    TietzeZigzag,
    Tctxt,
    Tgen,
    Trefl,
    Trel,
    Tsym,
    Ttrans,
    apply_step,
    expand_trel,
    j_pushout,
    search_equivalence,
    step_as_j_pushout,
    theorem1_cospan,
)
from .category import coequalizer, coproduct, equalizer, is_epi, is_mono, product, pushout
from .core import (
    Diagonal,
    Explicit,
    Morphism,
    Presentation,
    Pullback,
    Union,
    canonical_form,
    compose,
    identity,
    validate_morphism,
)
from .errors import (
    CertificateError,
    DomainError,
    FreshnessError,
    ParseError,
    PreconditionError,
    TietzeError,
    UnsupportedRepresentation,
    ValidationError,
)
from .model import (
    certify_weak_equivalence,
    factor_mono_tfib,
    is_cofibration,
    is_pseudo_fibrant,
    is_pseudo_fibration,
    is_trivial_fibration,
    ken_brown_cospan,
    pseudo_fibrant_replacement,
    solve_lifting,
)
from .monoids import MonoidTable, library
from .rewriting import (
    Budget,
    Derivation,
    HomCertificate,
    Proved,
    Refuted,
    Unknown,
    count_elements,
    equivalent,
    knuth_bendix,
    normal_form,
    separate,
)

__version__ = "0.1.0"
