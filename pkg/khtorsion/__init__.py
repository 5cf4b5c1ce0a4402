"""
khtorsion - Lee-deformed Khovanov homology over F_p[x] and cobordism maps.

Computes Kh_t(K) for a knot diagram as a bigraded module over F[x] with
t = x², reads off the torsion order xo(K), and builds the chain maps of
knot cobordisms presented as movies, checking the relation

    (2x)^M · φ_mirror ∘ φ = (2x)^(b-m) · id

up to a unit scalar.

Quick Start:
    from khtorsion import parse_pd, build_complex, homology

    trefoil = parse_pd("X(1,4,2,5) X(3,6,4,1) X(5,2,6,3)")
    h = homology(build_complex(trefoil))
    h.xo                      # 1

Movies:
    from khtorsion import load_movie, verify_theorem1

    report = verify_theorem1(load_movie("khtorsion/corpus/ribbon.json"))
    report.passed, report.unit_scalar

Command line:
    khtorsion homology trefoil.pd
    khtorsion movie ribbon.json --checks theorem1 ribbon
    khtorsion batch --workers 4
"""

from .algebra import (
    DEFAULT_PRIME,
    FieldElement,
    ModuleDecomposition,
    Polynomial,
    PolyMatrix,
    SmithForm,
    check_prime,
    field_homology_dimension,
    module_decompose,
    poly_gcd,
    snf,
)
from .complex import ChainComplex, ChainMap, build_complex, dot_map
from .diagram import (
    OrientedDiagram,
    crossing_signs,
    load_diagram,
    match_diagrams,
    mirror_diagram,
    parse_pd,
    resolve_state,
)
from .errors import InputError, InternalError, KhtError
from .homology import (
    HomologyMap,
    HomologyResult,
    homology,
    induced_homology_map,
    specialize_dimension,
    torsion_order,
)
from .maps import elementary_map, mirror_movie_map, movie_map
from .movie import Movie, load_movie, mirror_movie, parse_movie
from .verify import (
    CheckReport,
    check_ribbon_injective,
    corollary_bounds,
    verify_neck_cutting,
    verify_reverse_saddles,
    verify_theorem1,
)
from .argparse_conf import create_parser, create_parser_from_dict, create_parser_from_yaml
from .models import RunConfig

__all__ = [
    # algebra
    'DEFAULT_PRIME',
    'FieldElement',
    'Polynomial',
    'PolyMatrix',
    'SmithForm',
    'ModuleDecomposition',
    'check_prime',
    'poly_gcd',
    'snf',
    'module_decompose',
    'field_homology_dimension',

    # diagrams and complexes
    'OrientedDiagram',
    'parse_pd',
    'load_diagram',
    'crossing_signs',
    'resolve_state',
    'mirror_diagram',
    'match_diagrams',
    'ChainComplex',
    'ChainMap',
    'build_complex',
    'dot_map',

    # homology
    'HomologyResult',
    'HomologyMap',
    'homology',
    'torsion_order',
    'specialize_dimension',
    'induced_homology_map',

    # movies and checks
    'Movie',
    'parse_movie',
    'load_movie',
    'mirror_movie',
    'elementary_map',
    'movie_map',
    'mirror_movie_map',
    'CheckReport',
    'verify_theorem1',
    'verify_neck_cutting',
    'verify_reverse_saddles',
    'check_ribbon_injective',
    'corollary_bounds',

    # configuration
    'RunConfig',
    'create_parser',
    'create_parser_from_yaml',
    'create_parser_from_dict',

    # errors
    'KhtError',
    'InputError',
    'InternalError',
]

from ._version import __version__
__description__ = 'Lee-deformed Khovanov homology, torsion orders and cobordism maps'
