"""Almost-periodic pseudodifferential operators with trigonometric-polynomial symbols.

Exact symbol algebra over a frequency module, three operator
representations (action on trigonometric polynomials, frequency-indexed
kernel matrices, tensor action on grid functions) and numerical spectral
tools built on them.
"""

from .errors import (AppdoError, DerivativeOrderError, DimensionError, DomainError, ExprSyntaxError,
                     HypothesisError, IndependenceError, PoleError, SchemaError, SymbolClassError,
                     WindowCapError)
from .expr import CoeffFn, parse_coeff_expr
from .frequencies import (Frequency, FrequencyWindow, GeneratorSet, embed, embed_many, integer_basis,
                          module_closure, window_enumerate)
from .grid import Grid
from .symbols import (APSymbol, SymbolClassParams, TPFunction, adjoint_symbol, apply_to_tp,
                      besicovitch_sobolev_norm, bochner_fejer, bochner_fejer_bound, bohr_fourier,
                      compose_symbols, evaluate_symbol, hermitian_part, hypoellipticity_check,
                      mean_value_box, mean_value_exact, seminorm_estimate, translate_symbol)
from .gladyshev import (KernelMatrix, VectorField, apply_UaD, build_kernel, growth_sweep,
                        isometry_sweep, positivity_check, weighted_norm)
from .cms import HermiteBasis, TensorTP, apply_A, equivalence_residual, q_map
from .spectral import (SpectrumReport, character_residual, finite_section_spectrum, hausdorff,
                       invariance_check, multiplication_spectrum, multiplier_spectrum,
                       resolvent_window, weyl_residual)
from .symbolfile import dump, dumps, load, loads, parse_symbol_file

__version__ = "0.1.0"
