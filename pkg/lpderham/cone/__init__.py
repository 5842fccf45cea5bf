from lpderham.cone.charts import Chart, ChartCheck, chart_integral_check, gauss_box
from lpderham.cone.classes import nontrivial_class_check
from lpderham.cone.divergence import (DivergenceReport, ScanReport, detect_divergence, p_grid,
                                      scan_thresholds)
from lpderham.cone.homotopy import (HornModel, RetractionExperiment, homotopy_bound_constant,
                                    horn_growth, retraction_operator_experiment)
from lpderham.cone.metric import (ConeMetric, RadialForm, TruncationSchedule, critical_exponent,
                                  lp_norm_truncated, r_integral, torus_integral)
from lpderham.lifts.expressions import Expression


def get_radial_form(payload, m):
    """{k, base_norm}: base_norm is a number or an expression in x0, …, x{m−1} on the torus."""
    if isinstance(payload, int):
        return RadialForm(payload)
    k = payload['k']
    base_norm = payload.get('base_norm', 1.0)
    if isinstance(base_norm, str):
        base_norm = Expression(base_norm, m)
    return RadialForm(k, base_norm, name=payload.get('name'))
