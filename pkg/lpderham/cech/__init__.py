from lpderham.cech.cochain import (CechCochain, cech_d, cech_delta, random_cochain,
                                   total_differential)
from lpderham.cech.constants import ConstantSolution, pairing, solve_constants
from lpderham.cech.primitive import PiecewiseForm, PrimitiveReport, global_primitive, lp_norm
from lpderham.cech.zigzag import (LINE_INTEGRAL_SIGN, ZigzagState, chain_line_integral,
                                  integrate_over_cycle, localize, zigzag)
