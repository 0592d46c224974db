"""Hasse-Schmidt derivations over F_p: arithmetic, constructive integration
and detection of integrability leaps."""

from .bivariate import (BiHSDeriv, CoIdeal2, bi_apply, bi_compose, bi_inverse, bstar,
                        external_product, fstar_inv, gd, gd_pt, substitute)
from .digits import (BasePDigits, binom_mod_p, cset_max, fermat_system, min_nonzero_binom,
                     s_p, t_p)
from .errors import HSError
from .hsd import (HSDeriv, TruncSeries, apply, compose, compress, e_dm, ell, ell_e, inverse,
                  is_logarithmic, pad_extend, scale, stretch, truncate)
from .integrate import (PipelineTrace, SearchOracle, bridge_leap, build_killer,
                        compress_integral, integrate6_char2, integrate_via_tp)
from .leapfinder import (IderTable, SearchBounds, find_log_integral, ider_dims,
                         log_derivations, scan_leaps)
from .poly import (IdealPresentation, Poly, WeightVector, groebner_basis, in_ideal,
                   normal_form, weighted_parts)
from .zpfield import FpElem, FpMatrix, inv, primitive_root, solve_affine

__all__ = [
    "BiHSDeriv", "CoIdeal2", "bi_apply", "bi_compose", "bi_inverse", "bstar",
    "external_product", "fstar_inv", "gd", "gd_pt", "substitute", "BasePDigits", "binom_mod_p",
    "cset_max", "fermat_system", "min_nonzero_binom", "s_p", "t_p", "HSError", "HSDeriv",
    "TruncSeries", "apply", "compose", "compress", "e_dm", "ell", "ell_e", "inverse",
    "is_logarithmic", "pad_extend", "scale", "stretch", "truncate", "PipelineTrace",
    "SearchOracle", "bridge_leap", "build_killer", "compress_integral", "integrate6_char2",
    "integrate_via_tp", "IderTable", "SearchBounds", "find_log_integral", "ider_dims",
    "log_derivations", "scan_leaps", "IdealPresentation", "Poly", "WeightVector",
    "groebner_basis", "in_ideal", "normal_form", "weighted_parts", "FpElem", "FpMatrix", "inv",
    "primitive_root", "solve_affine",
]

__version__ = "0.1.0"
