"""The ``derham`` driver: one subcommand per experiment, scenes in YAML.

Exit codes: 0 when every check passes, 2 for a scene that does not match its
schema, 3 when a mathematical check fails (the witness goes to
``<out>/witness.json``).
"""
import argparse
import logging
import sys

import numpy as np
import pandas as pd
import yaml
from tqdm import tqdm

from lpderham.cech import global_primitive, integrate_over_cycle, zigzag
from lpderham.cone import (ConeMetric, TruncationSchedule, get_radial_form, p_grid,
                           retraction_operator_experiment, scan_thresholds)
from lpderham.exceptions import CheckFailed, DerhamError, NonzeroPeriodError, SchemaError
from lpderham.flattening import (bilipschitz_estimate, build_flattening, continuity_test,
                                 flatten_cone_check, get_family, graph_cone_bound, graph_test,
                                 region_test, round_trip_error, tilted_cone_bound)
from lpderham.forms import get_form, homotopy_defect
from lpderham.forms.homotopy import integrate_dt, random_base_point, random_polyform
from lpderham.helper import get_helper
from lpderham.lifts import (Band, Curve, check_cell_preservation, check_endpoints,
                            check_tau_preservation, dyadic_grid, fit_growth_exponents, get_cell,
                            get_retraction, lift_through, lipschitz_criterion, sample_cloud,
                            verify_declared_constants)
from lpderham.lifts.expressions import Expression
from lpderham.topology import (Chain, boundary, get_complex, get_cover, homology, homology_report,
                               nerve)
from lpderham.utils.utils import create_table, reseed

logger = logging.getLogger('logger')

EXIT_OK, EXIT_SCHEMA, EXIT_CHECK = 0, 2, 3
DEFAULT_SEED = 5
PERIOD_TOL = 1e-9
ROUND_TRIP_TOL = 1e-9
BOUND_SLACK = 1.05
LIFT_TOL = 1e-9

NUMBER = (int, float)
TEXT = (str,)
PAYLOAD = (str, dict)

# key -> (accepted types, required)
SCHEMAS = {
    'homotopy-check': {
        'n_forms': ((int,), False), 'max_n': ((int,), False), 'max_degree': ((int,), False),
        'max_k': ((int,), False), 'eps': ((list,), False),
    },
    'homology': {
        'complex': (PAYLOAD, True), 'cover': (PAYLOAD, False), 'max_degree': ((int,), False),
    },
    'periods': {
        'complex': (PAYLOAD, True), 'cover': (PAYLOAD, False), 'form': (PAYLOAD, True),
        'p': (NUMBER, False), 'cycles': ((list,), False),
    },
    'cone-threshold': {
        'alpha': (NUMBER + TEXT, True), 'm': ((int,), True), 'k': ((int,), True),
        'p_min': (NUMBER, True), 'p_max': (NUMBER, True), 'p_step': (NUMBER, True),
        'schedule': (TEXT, False), 'base_norm': (NUMBER + TEXT, False),
        'experiment': ((dict,), False),
    },
    'lift-analyze': {
        'cell': ((dict,), True), 'base_retraction': ((dict,), True), 'samples': ((int,), False),
        'margin': (NUMBER, False), 't_grid': ((list, str), False), 'curves': ((list,), False),
        'bound': (NUMBER, False), 'pairs': ((int,), False),
    },
    'flatten': {
        'family': (PAYLOAD, True), 'samples': ((int,), False), 'aperture': (NUMBER, False),
        'checks': ((list,), False), 'graph_cone': ((dict,), False),
        'tilted_cone': ((dict,), False),
    },
}
COMMON_KEYS = {'seed': ((int,), False), 'name': (TEXT, False)}


def maybe_override_parameter(params: dict, args, parameter_name: str):
    """Optionally overrides a parameter using a command-line argument of the same name."""
    val = getattr(args, parameter_name, None)
    if val is not None:
        print(
            "[INFO] overriding parameter {} from params file to value {} from args"
                .format(parameter_name, val))
        params[parameter_name] = val
    return


def validate_scene(command, params):
    schema = dict(SCHEMAS[command], **COMMON_KEYS)
    unknown = sorted(set(params) - set(schema))
    if unknown:
        raise SchemaError(f'Unknown keys for {command}: {unknown}.')
    for key, (types, required) in schema.items():
        if key not in params:
            if required:
                raise SchemaError(f'{command} needs the key {key!r}.')
            continue
        value = params[key]
        if isinstance(value, bool) or not isinstance(value, types):
            raise SchemaError(f'{key!r} has type {type(value).__name__}; expected '
                              f'{" or ".join(t.__name__ for t in types)}.')


def make_uid(params, command):
    uid = "{cmd}-{name}-seed{seed}".format(cmd=command, name=params.get('name', 'scene'),
                                            seed=params.get('seed'))
    if command == 'cone-threshold':
        uid += '-alpha{alpha}-m{m}-k{k}'.format(**params)
    # fractional alphas such as 3/2 must not nest the run folder
    return uid.replace('/', '_')


# ---------------------------------------------------------------- homotopy-check

def cmd_homotopy_check(helper, params, rng, fmt, integrator=integrate_dt, verbose=False):
    n_forms = params.get('n_forms', 50)
    max_n, max_k = params.get('max_n', 4), params.get('max_k', 3)
    max_degree = params.get('max_degree', 3)
    eps_choices = [str(e) for e in params.get('eps', ['0', '1/2'])]
    if n_forms < 0 or max_n < 1 or max_k < 0 or max_degree < 0 or not eps_choices:
        raise SchemaError('Counts and bounds of the homotopy check must be nonnegative.')
    rows = []
    for i in tqdm(range(n_forms), desc='homotopy identity', disable=not verbose):
        n = int(rng.integers(1, max_n + 1))
        k = int(rng.integers(0, min(max_k, n) + 1))
        degree = int(rng.integers(0, max_degree + 1))
        eps = eps_choices[int(rng.integers(len(eps_choices)))]
        omega = random_polyform(rng, n, k, degree=degree)
        base = random_base_point(rng, n)
        defect = homotopy_defect(omega, base, eps, integrator)
        exact = defect.is_zero()
        rows.append((i, n, k, degree, eps, exact))
        if not exact:
            frame = pd.DataFrame(rows, columns=['index', 'n', 'k', 'degree', 'eps', 'exact'])
            helper.write_report(frame, {'forms': len(rows), 'all_exact': False}, 'homotopy', fmt)
            raise CheckFailed(f'Homotopy identity fails for form {i}.',
                              witness={'form': omega.to_json(), 'base': [str(b) for b in base],
                                       'eps': eps, 'defect': defect.to_json()})
    frame = pd.DataFrame(rows, columns=['index', 'n', 'k', 'degree', 'eps', 'exact'])
    helper.write_report(frame, {'forms': len(rows), 'all_exact': True}, 'homotopy', fmt)
    logger.info(f'Homotopy identity exact on {len(rows)} random forms.')
    return EXIT_OK


# ---------------------------------------------------------------- homology

def cmd_homology(helper, params, rng, fmt, **_):
    try:
        complex_ = get_complex(params['complex'])
    except (KeyError, TypeError, ValueError) as err:
        raise SchemaError(str(err)) from err
    max_degree = params.get('max_degree')
    if max_degree is not None and max_degree < 0:
        raise SchemaError('max_degree must be nonnegative.')
    report = homology_report(complex_, max_degree)
    frame = pd.DataFrame({'degree': range(len(report['betti'])), 'betti': report['betti']})
    if 'cover' in params:
        try:
            nerve_ = nerve(get_cover(complex_, params['cover']))
        except (KeyError, TypeError, ValueError) as err:
            raise SchemaError(str(err)) from err
        top = complex_.dimension if max_degree is None else max_degree
        report['nerve_betti'] = homology_report(nerve_, top)['betti']
        frame['nerve_betti'] = report['nerve_betti']
    logger.info(f'Betti numbers {report["betti"]}.')
    helper.write_report(frame, report, 'homology', fmt)
    return EXIT_OK


# ---------------------------------------------------------------- periods

def _scene_cycles(params, nerve_, degree):
    if 'cycles' not in params:
        return homology(nerve_, degree)[1]
    cycles = []
    for payload in params['cycles']:
        chain = Chain.from_json(payload)
        if chain.degree != degree:
            raise SchemaError(f'A {chain.degree}-chain given for a {degree}-form.')
        if degree > 0 and not boundary(chain).is_zero():
            raise SchemaError(f'{chain} is not a cycle.')
        cycles.append(chain)
    return cycles


def cmd_periods(helper, params, rng, fmt, **_):
    try:
        complex_ = get_complex(params['complex'])
        nerve_ = nerve(get_cover(complex_, params.get('cover')))
        form = get_form(params['form'], complex_.ambient_dim)
    except (KeyError, TypeError, ValueError) as err:
        raise SchemaError(str(err)) from err
    p = float(params.get('p', 2.0))
    cycles = _scene_cycles(params, nerve_, form.k)
    state = zigzag(form, nerve_, rng=rng)
    rows = []
    for i, cycle in enumerate(cycles):
        value = integrate_over_cycle(form, cycle, nerve_, state=state)
        rows.append((i, str(cycle), value))
        helper.plot(i, value, 'period')
    frame = pd.DataFrame(rows, columns=['cycle', 'chain', 'value'])
    summary = {'periods': [{'cycle': c.to_json(), 'value': v} for c, (_, _, v) in zip(cycles, rows)],
               'primitive_norm_ratio': None}
    if all(abs(v) < PERIOD_TOL for _, _, v in rows) and form.k >= 1 \
            and complex_.dimension == complex_.ambient_dim:
        try:
            report = global_primitive(form, nerve_, p=p, rng=rng, state=state)
        except NonzeroPeriodError:
            helper.write_report(frame, summary, 'periods', fmt)
            raise
        summary['primitive_norm_ratio'] = report.norm_ratio
        summary['primitive_exact'] = report.exact
    helper.write_report(frame, summary, 'periods', fmt)
    return EXIT_OK


# ---------------------------------------------------------------- cone-threshold

def cmd_cone_threshold(helper, params, rng, fmt, verbose=False, **_):
    try:
        metric = ConeMetric(params['alpha'], params['m'])
        omega = get_radial_form({'k': params['k'], 'base_norm': params.get('base_norm', 1.0)},
                                params['m'])
        omega.check(metric)
        schedule = TruncationSchedule.parse(params.get('schedule', '4:20'))
        grid = p_grid(params['p_min'], params['p_max'], params['p_step'])
    except ValueError as err:
        raise SchemaError(str(err)) from err
    scan = scan_thresholds(omega, metric, grid, schedule, progress=verbose)
    for i, row in enumerate(scan.rows):
        helper.plot(i, row.slope, 'slope')
    helper.write_report(scan.to_frame(), scan.summary, 'threshold', fmt)

    experiment = params.get('experiment')
    if experiment:
        _retraction_experiment(helper, experiment, omega, metric, rng, fmt)
    return EXIT_OK


def _retraction_experiment(helper, experiment, omega, metric, rng, fmt):
    frames, worst = [], None
    for p in experiment.get('p', []):
        result = retraction_operator_experiment(omega, metric, float(p),
                                                experiment.get('eps', [0.0, 0.5]), rng)
        frame = result.to_frame()
        frame.insert(0, 'p', float(p))
        frames.append(frame)
        for eps, _, ratio, bound, *_ in result.rows:
            if bound is not None and ratio > BOUND_SLACK * bound:
                worst = {'p': float(p), 'eps': eps, 'ratio': ratio, 'bound': bound}
    if not frames:
        raise SchemaError('The retraction experiment needs at least one p.')
    table = pd.concat(frames, ignore_index=True)
    for i, ratio in enumerate(table['ratio']):
        helper.plot(i, float(ratio), 'retraction_ratio')
    helper.write_report(table, {'bound_violation': worst}, 'retraction', fmt)
    if worst is not None:
        raise CheckFailed('Measured ‖R_ε ω‖/‖ω‖ exceeds the homotopy bound.', witness=worst)


# ---------------------------------------------------------------- lift-analyze

def _t_grid(spec):
    if spec is None:
        return dyadic_grid()
    if isinstance(spec, str):
        j_min, j_max = (int(v) for v in spec.split(':'))
        return dyadic_grid(j_min, j_max)
    return np.asarray(spec, dtype=float)


def _check_cell(cell, rng, pairs):
    """θ₁ < θ₂ on every band of the tower, then the declared Lipschitz constants."""
    widths = {}
    for depth, level in enumerate(cell.tower()):
        if isinstance(level, Band):
            widths[depth] = level.check_ordering(rng)
    quotients = verify_declared_constants(cell, rng, pairs)
    logger.info(f'Cell checks passed: min widths {widths}, sup quotients {quotients}.')
    return {'min_width': widths, 'sup_quotient': quotients}


def _check_retraction(cell, retraction, points, t_grid):
    errors = check_endpoints(retraction, points)
    for key, value in errors.items():
        if value > LIFT_TOL:
            raise CheckFailed(f'The retraction misses an endpoint: {key} = {value:.6g}.',
                              witness={'check': key, 'value': value})
    if isinstance(cell, Band):
        errors['tau_error'] = check_tau_preservation(retraction, points, t_grid)
        if errors['tau_error'] > LIFT_TOL:
            raise CheckFailed(f'The lift moves τ by {errors["tau_error"]:.6g}.',
                              witness={'check': 'tau_error', 'value': errors['tau_error']})
    escape = check_cell_preservation(retraction, cell, points, t_grid)
    if escape is not None:
        raise CheckFailed(f'r(q, {escape["t"]}) leaves the cell.', witness=escape)
    return errors


def cmd_lift_analyze(helper, params, rng, fmt, **_):
    try:
        cell = get_cell(params['cell'])
        base = get_retraction(params['base_retraction'])
        retraction = lift_through(cell, base)
        t_grid = _t_grid(params.get('t_grid'))
        curves = [Curve(c) for c in params.get('curves', [])]
    except (KeyError, TypeError, ValueError) as err:
        raise SchemaError(str(err)) from err
    summary, failure = {'cell': _check_cell(cell, rng, params.get('pairs', 100_000))}, None
    points = sample_cloud(cell, rng, params.get('samples', 2000), params.get('margin', 0.0))
    summary['retraction'] = _check_retraction(cell, retraction, points, t_grid)
    if isinstance(cell, Band):
        base_retraction = lift_through(cell.base, base)
        criterion = lipschitz_criterion(cell.lower, cell.upper, base_retraction, points[:, :-1],
                                        t_grid, curves, bound=params.get('bound', 1e3))
        summary.update({'criterion': criterion.verdict, 'sup_ratio': criterion.sup_ratio,
                        'witness': criterion.witness, 'curve_slopes': criterion.curve_slopes})
        helper.write_report(criterion.to_frame(), {'verdict': criterion.verdict}, 'criterion', fmt)
        if criterion.verdict == 'unbounded':
            failure = CheckFailed('The lift criterion is unbounded: the standard lift is not '
                                  'Lipschitz.', witness=criterion.witness)
    fit = fit_growth_exponents(retraction, points, t_grid)
    for i, (norm, det) in enumerate(zip(fit.sup_norms, fit.inf_dets)):
        helper.plot(i, norm, 'sup_norm')
        helper.plot(i, det, 'inf_det')
    summary.update(fit.summary())
    helper.write_report(fit.to_frame(), summary, 'growth', fmt)
    if failure is not None:
        raise failure
    return EXIT_OK


# ---------------------------------------------------------------- flatten

FLATTEN_CHECKS = ('round_trip', 'graph', 'region', 'continuity', 'bilipschitz', 'flatten_cone',
                  'graph_cone', 'tilted_cone')


def cmd_flatten(helper, params, rng, fmt, **_):
    try:
        family = get_family(params['family'])
    except (KeyError, TypeError, ValueError) as err:
        raise SchemaError(str(err)) from err
    checks = params.get('checks', ['round_trip', 'graph', 'region', 'continuity', 'bilipschitz'])
    unknown = sorted(set(checks) - set(FLATTEN_CHECKS))
    if unknown:
        raise SchemaError(f'Unknown flattening checks {unknown}.')
    samples = params.get('samples', 100_000)
    aperture = float(params.get('aperture', 0.9))
    h = build_flattening(family, rng)
    rows, summary, failures = [], {'family': family.name, 'tilt': family.tilt}, []

    def record(check, value, passed, witness=None):
        rows.append((check, value, passed))
        summary[check] = {'value': value, 'passed': passed}
        if not passed:
            failures.append({'check': check, 'value': value, 'witness': witness})

    if 'round_trip' in checks:
        error = round_trip_error(h, rng, samples)
        record('round_trip', error, error <= ROUND_TRIP_TOL)
    if 'graph' in checks:
        error = max(graph_test(h).values())
        record('graph', error, error <= ROUND_TRIP_TOL)
    if 'region' in checks:
        excess = max((v for v in region_test(h, rng, samples).values() if v is not None),
                     default=0.0)
        record('region', excess, excess <= ROUND_TRIP_TOL)
    if 'continuity' in checks:
        quotient = continuity_test(h, rng)
        record('continuity', quotient, np.isfinite(quotient))
    if 'bilipschitz' in checks:
        estimate = bilipschitz_estimate(h, rng, min(samples, 10_000))
        record('bilipschitz_lower', estimate.lower, not estimate.degenerate)
        record('bilipschitz_upper', estimate.upper, np.isfinite(estimate.upper))
    if 'flatten_cone' in checks:
        result = flatten_cone_check(h, aperture, rng, samples)
        record('flatten_cone', result.aperture, result.report.violations == 0,
               result.report.witness)
    if 'graph_cone' in checks:
        spec = params.get('graph_cone', {})
        xi = Expression(spec['xi'], spec['n'], lipschitz=spec['L'])
        report = graph_cone_bound(xi, float(spec['L']), float(spec.get('M', aperture)), rng,
                                  samples)
        record('graph_cone', report.aperture, report.violations == 0, report.witness)
    if 'tilted_cone' in checks:
        spec = params.get('tilted_cone', {})
        report = tilted_cone_bound(spec['lambda'], float(spec.get('M', aperture)), rng, samples)
        record('tilted_cone', report.aperture, report.vacuous or report.violations == 0,
               report.witness)
        summary['tilted_cone'].update({'vacuous': report.vacuous, **report.extra})

    frame = pd.DataFrame(rows, columns=['check', 'value', 'passed'])
    helper.write_report(frame, summary, 'flatten', fmt)
    if failures:
        raise CheckFailed(f'Flattening checks failed: {[f["check"] for f in failures]}.',
                          witness={'failures': failures})
    return EXIT_OK


COMMANDS = {
    'homotopy-check': cmd_homotopy_check,
    'homology': cmd_homology,
    'periods': cmd_periods,
    'cone-threshold': cmd_cone_threshold,
    'lift-analyze': cmd_lift_analyze,
    'flatten': cmd_flatten,
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog='derham', description='Experiments on L^p forms of singular spaces.',
        epilog='CSV tables start with a "# seed=N" line; the JSON summaries mirror them. '
               'Columns: homotopy (index, n, k, degree, eps, exact); homology (degree, betti, '
               'nerve_betti); periods (cycle, chain, value); threshold (p, slope, verdict); '
               'growth (t, sup_norm, inf_det); flatten (check, value, passed).')
    sub = parser.add_subparsers(dest='command')
    for command in COMMANDS:
        p = sub.add_parser(command)
        p.add_argument('--scene', default=None, help='YAML or JSON scene file.')
        p.add_argument('--seed', default=None, type=int, help='Overrides the scene seed.')
        p.add_argument('--out', default=None, help='Output folder (default runs/<uid>).')
        p.add_argument('--format', dest='fmt', default='csv', choices=['csv', 'json'])
        p.add_argument('--logdir', default=None, help='Location to write TensorBoard logs.')
        p.add_argument('--verbose', action='store_true', default=False)
        if command == 'homotopy-check':
            p.add_argument('--n-forms', dest='n_forms', default=None, type=int)
        elif command == 'cone-threshold':
            p.add_argument('--alpha', default=None, type=str)
            p.add_argument('--m', default=None, type=int)
            p.add_argument('--k', default=None, type=int)
            p.add_argument('--p-min', dest='p_min', default=None, type=float)
            p.add_argument('--p-max', dest='p_max', default=None, type=float)
            p.add_argument('--p-step', dest='p_step', default=None, type=float)
            p.add_argument('--schedule', default=None, help='jmin:jmax, ε_j = 2^-j.')
        elif command == 'flatten':
            p.add_argument('--samples', default=None, type=int)
    return parser


OVERRIDES = {
    'homotopy-check': ('n_forms',),
    'cone-threshold': ('alpha', 'm', 'k', 'p_min', 'p_max', 'p_step', 'schedule'),
    'flatten': ('samples',),
}


def load_scene(path):
    if path is None:
        return {}
    try:
        with open(path) as f:
            params = yaml.safe_load(f)
    except (OSError, yaml.YAMLError) as err:
        raise SchemaError(f'Cannot read scene {path}: {err}') from err
    if params is None:
        return {}
    if not isinstance(params, dict):
        raise SchemaError('A scene is a mapping of keys to values.')
    return params


def _configure_logging(folder_path, verbose):
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()
    logger.addHandler(logging.FileHandler(filename=f'{folder_path}/log.txt'))
    stream = logging.StreamHandler()
    stream.setLevel(logging.DEBUG if verbose else logging.INFO)
    logger.addHandler(stream)
    logger.setLevel(logging.DEBUG)


def main(argv=None, integrator=None):
    args = build_parser().parse_args(argv)
    if args.command is None:
        build_parser().print_help()
        return EXIT_SCHEMA
    helper = None
    try:
        params = load_scene(args.scene)
        for pname in OVERRIDES.get(args.command, ()) + ('seed',):
            maybe_override_parameter(params, args, pname)
        params.setdefault('seed', DEFAULT_SEED)
        validate_scene(args.command, params)

        name = make_uid(params, args.command)
        helper = get_helper(params, name, folder_path=args.out, logdir=args.logdir)
        _configure_logging(helper.folder_path, args.verbose)
        logger.info(f'experiment uid: {name}')
        logger.info(f'current path: {helper.folder_path}')
        logger.info(create_table({k: v for k, v in params.items() if k != 'environment_name'}))

        rng = reseed(params['seed'])
        kwargs = {'verbose': args.verbose}
        if integrator is not None:
            kwargs['integrator'] = integrator
        scene = {k: v for k, v in params.items()
                 if k not in ('folder_path', 'environment_name')}
        code = COMMANDS[args.command](helper, scene, rng, args.fmt, **kwargs)
        logger.info(f'Finished {args.command}. Folder: {helper.folder_path}')
        return code
    except SchemaError as err:
        logger.error(f'Schema error: {err}')
        print(f'[ERROR] {err}', file=sys.stderr)
        return EXIT_SCHEMA
    except CheckFailed as err:
        logger.error(f'Check failed: {err}')
        if helper is not None:
            helper.write_json({'message': str(err), 'witness': err.witness}, 'witness.json')
        return EXIT_CHECK
    except DerhamError as err:
        logger.error(f'{type(err).__name__}: {err}')
        return EXIT_CHECK
    except ValueError as err:
        logger.error(f'Invalid input: {err}')
        return EXIT_SCHEMA
    finally:
        if helper is not None:
            helper.close()


if __name__ == '__main__':
    sys.exit(main())
