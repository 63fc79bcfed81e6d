"""Exact ramification, Lubin-Tate and conjugation computations over p-adic rings."""

from .criterion import (CHAR_P_INDICATED, CHAR_ZERO_CONSISTENT, INCONCLUSIVE, closed_form_predict,
                        criterion_check, findin_predict, height, lt_ram_profile, predict_in,
                        ratio_check, sen_check)
from .errors import (IDENTITY_AT_PRECISION, INFINITE_AT_PRECISION, HypothesisError, PrecisionError,
                     RamforgeError, ResidualError, SchemaError, ValidationError)
from .herbrand import (PiecewiseLinear, herbrand_gap, phi_from_filtration, psi_from_filtration,
                       synthetic_filtration, upper_breaks)
from .lifting import (ConjugatedLubinTateOracle, case1_reduce, conjugator_step, lemma_same_check,
                      level_space, rectify, solve_theta)
from .lubintate import FormalGroupLaw, FrobeniusSeries, lazard_check, lt_endo, lt_group, lt_solve
from .nottingham import FiniteFiltration, NottElem, finite_quotient_filtration, ram_number, ram_sequence
from .ring import FiniteField, OKElem, RingSpec, make_ring
from .series import BiSeries, Series

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
