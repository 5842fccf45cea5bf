import json
import math
import os

import pytest
import yaml

from lpderham.cli import EXIT_CHECK, EXIT_OK, EXIT_SCHEMA, main, make_uid
from lpderham.forms.homotopy import integrate_dt

PARAMS = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'params')


def write_scene(tmp_path, scene, name='scene.yaml'):
    path = tmp_path / name
    path.write_text(yaml.safe_dump(scene))
    return str(path)


def run(command, scene, out, *extra, **kwargs):
    return main([command, '--scene', scene, '--out', str(out)] + list(extra), **kwargs)


def corrupted_integrator(p, eps, target_ring):
    return integrate_dt(p, eps, target_ring) + 1


def test_homotopy_check_passes(tmp_path):
    scene = write_scene(tmp_path, {'n_forms': 5, 'max_n': 3})
    assert run('homotopy-check', scene, tmp_path / 'out') == EXIT_OK
    with open(tmp_path / 'out' / 'homotopy.csv') as f:
        assert f.readline().strip() == '# seed=5'
    with open(tmp_path / 'out' / 'homotopy_summary.json') as f:
        assert json.load(f)['all_exact']


def test_homotopy_check_with_no_forms(tmp_path):
    scene = write_scene(tmp_path, {'n_forms': 0})
    assert run('homotopy-check', scene, tmp_path / 'out') == EXIT_OK


def test_corrupted_integrator_is_caught(tmp_path):
    scene = write_scene(tmp_path, {'n_forms': 20})
    code = run('homotopy-check', scene, tmp_path / 'out', integrator=corrupted_integrator)
    assert code == EXIT_CHECK
    with open(tmp_path / 'out' / 'witness.json') as f:
        witness = json.load(f)['witness']
    assert {'form', 'base', 'eps', 'defect'} <= set(witness)


def test_unknown_key_is_a_schema_error(tmp_path):
    scene = write_scene(tmp_path, {'n_forms': 1, 'colour': 'blue'})
    assert run('homotopy-check', scene, tmp_path / 'out') == EXIT_SCHEMA


def test_wrong_type_is_a_schema_error(tmp_path):
    scene = write_scene(tmp_path, {'n_forms': 'many'})
    assert run('homotopy-check', scene, tmp_path / 'out') == EXIT_SCHEMA


def test_empty_p_grid_is_a_schema_error(tmp_path):
    scene = write_scene(tmp_path, {'alpha': 1, 'm': 1, 'k': 1, 'p_min': 3.0, 'p_max': 2.0,
                                   'p_step': 0.05})
    assert run('cone-threshold', scene, tmp_path / 'out') == EXIT_SCHEMA


def test_missing_scene_file_is_a_schema_error(tmp_path):
    assert run('periods', str(tmp_path / 'absent.yaml'), tmp_path / 'out') == EXIT_SCHEMA


def test_annulus_periods(tmp_path):
    scene = os.path.join(PARAMS, 'periods_annulus.yaml')
    assert run('periods', scene, tmp_path / 'out', '--format', 'json') == EXIT_OK
    with open(tmp_path / 'out' / 'periods.json') as f:
        report = json.load(f)
    values = [p['value'] for p in report['periods']]
    assert len(values) == 1
    assert abs(values[0]) == pytest.approx(2 * math.pi, abs=1e-6)
    assert report['primitive_norm_ratio'] is None


def test_disk_periods_emit_a_primitive(tmp_path):
    scene = os.path.join(PARAMS, 'periods_disk.yaml')
    assert run('periods', scene, tmp_path / 'out') == EXIT_OK
    with open(tmp_path / 'out' / 'periods_summary.json') as f:
        summary = json.load(f)
    assert summary['periods'] == []
    assert summary['primitive_exact']


def test_non_cycle_is_a_schema_error(tmp_path):
    scene = write_scene(tmp_path, {'complex': 'annulus', 'form': 'winding',
                                   'cycles': [[{'simplex': [0, 1], 'num': 1, 'den': 1}]]})
    assert run('periods', scene, tmp_path / 'out') == EXIT_SCHEMA


def test_cone_threshold_bracket_and_determinism(tmp_path):
    scene = write_scene(tmp_path, {'alpha': 1, 'm': 1, 'k': 1, 'p_min': 1.8, 'p_max': 2.2,
                                   'p_step': 0.05})
    assert run('cone-threshold', scene, tmp_path / 'a') == EXIT_OK
    assert run('cone-threshold', scene, tmp_path / 'b') == EXIT_OK
    first = (tmp_path / 'a' / 'threshold.csv').read_bytes()
    assert first == (tmp_path / 'b' / 'threshold.csv').read_bytes()
    with open(tmp_path / 'a' / 'threshold_summary.json') as f:
        summary = json.load(f)
    assert summary['p_star_exact'] == 2.0
    assert summary['p_star_bracket'] == pytest.approx([1.95, 2.0])


def test_cone_threshold_flags_override_the_scene(tmp_path):
    scene = write_scene(tmp_path, {'alpha': 1, 'm': 1, 'k': 1, 'p_min': 1.8, 'p_max': 2.2,
                                   'p_step': 0.05})
    assert run('cone-threshold', scene, tmp_path / 'out', '--alpha', '2', '--p-min', '1.3',
               '--p-max', '1.7') == EXIT_OK
    with open(tmp_path / 'out' / 'threshold_summary.json') as f:
        assert json.load(f)['p_star_exact'] == 1.5


def test_cone_threshold_with_the_retraction_experiment(tmp_path):
    scene = os.path.join(PARAMS, 'cone_threshold_111.yaml')
    assert run('cone-threshold', scene, tmp_path / 'out') == EXIT_OK
    assert (tmp_path / 'out' / 'retraction.csv').exists()


def test_lift_negative_scene_reports_unbounded(tmp_path):
    scene = os.path.join(PARAMS, 'lift_kink_negative.yaml')
    assert run('lift-analyze', scene, tmp_path / 'out') == EXIT_CHECK
    with open(tmp_path / 'out' / 'witness.json') as f:
        assert 'witness' in json.load(f)


def test_lift_positive_scene(tmp_path):
    scene = os.path.join(PARAMS, 'lift_kink_positive.yaml')
    assert run('lift-analyze', scene, tmp_path / 'out') == EXIT_OK
    with open(tmp_path / 'out' / 'growth_summary.json') as f:
        summary = json.load(f)
    assert summary['criterion'] == 'bounded'
    assert summary['lambda'] == pytest.approx(1.0, abs=0.05)
    assert summary['mu'] == pytest.approx(5.0, abs=0.1)


def test_lift_radial_scene(tmp_path):
    scene = os.path.join(PARAMS, 'lift_radial.yaml')
    assert run('lift-analyze', scene, tmp_path / 'out') == EXIT_OK
    with open(tmp_path / 'out' / 'growth_summary.json') as f:
        summary = json.load(f)
    assert summary['lambda'] == pytest.approx(1.0, abs=0.05)
    assert summary['mu'] == pytest.approx(2.0, abs=0.05)


def test_flatten_single_plane(tmp_path):
    scene = os.path.join(PARAMS, 'flatten_single_plane.yaml')
    assert run('flatten', scene, tmp_path / 'out', '--samples', '5000') == EXIT_OK


def test_flatten_tilted(tmp_path):
    scene = os.path.join(PARAMS, 'flatten_tilted.yaml')
    assert run('flatten', scene, tmp_path / 'out', '--samples', '20000') == EXIT_OK


def test_flatten_reports_a_violated_lipschitz_constant(tmp_path):
    scene = os.path.join(PARAMS, 'flatten_violating_L.yaml')
    assert run('flatten', scene, tmp_path / 'out') == EXIT_CHECK
    with open(tmp_path / 'out' / 'witness.json') as f:
        witness = json.load(f)['witness']
    assert witness['declared'] == 0.1


def load_scene(name):
    with open(os.path.join(PARAMS, name)) as f:
        return yaml.safe_load(f)


def test_lift_positive_scene_reports_the_retraction_checks(tmp_path):
    scene = os.path.join(PARAMS, 'lift_kink_positive.yaml')
    assert run('lift-analyze', scene, tmp_path / 'out') == EXIT_OK
    with open(tmp_path / 'out' / 'growth_summary.json') as f:
        summary = json.load(f)
    assert all(width >= 0 for width in summary['cell']['min_width'].values())
    assert summary['retraction']['tau_error'] < 1e-9
    assert all(value <= 1e-9 for value in summary['retraction'].values())


def test_lift_rejects_an_understated_lipschitz_constant(tmp_path):
    params = load_scene('lift_kink_positive.yaml')
    params['cell']['L_upper'] = 1
    scene = write_scene(tmp_path, params)
    assert run('lift-analyze', scene, tmp_path / 'out') == EXIT_CHECK
    with open(tmp_path / 'out' / 'witness.json') as f:
        witness = json.load(f)['witness']
    assert witness['declared'] == 1
    assert witness['quotient'] > 1


def test_lift_rejects_crossing_band_functions(tmp_path):
    scene = write_scene(tmp_path, {
        'name': 'crossing', 'seed': 5,
        'cell': {'type': 'band', 'base': {'type': 'interval', 'a': -1, 'b': 1},
                 'lower': 'x0', 'upper': '0'},
        'base_retraction': {'type': 'diagonal', 'weights': [1]},
        't_grid': '1:6'})
    assert run('lift-analyze', scene, tmp_path / 'out') == EXIT_CHECK
    with open(tmp_path / 'out' / 'witness.json') as f:
        witness = json.load(f)['witness']
    assert witness['width'] < 0
    assert witness['x'][0] > 0


def test_annulus_homology(tmp_path):
    scene = os.path.join(PARAMS, 'homology_annulus.yaml')
    assert run('homology', scene, tmp_path / 'out') == EXIT_OK
    with open(tmp_path / 'out' / 'homology_summary.json') as f:
        report = json.load(f)
    assert report['betti'] == [1, 1, 0]
    assert report['nerve_betti'] == [1, 1, 0]
    assert [len(cycles) for cycles in report['cycles']] == [1, 1, 0]


def test_homology_as_json(tmp_path):
    scene = write_scene(tmp_path, {'name': 'sphere', 'seed': 5,
                                   'complex': 'tetrahedron_boundary'})
    assert run('homology', scene, tmp_path / 'out', '--format', 'json') == EXIT_OK
    with open(tmp_path / 'out' / 'homology.json') as f:
        report = json.load(f)
    assert report['betti'] == [1, 0, 1]
    assert len(report['cycles'][2]) == 1
    assert 'nerve_betti' not in report
    assert [row['betti'] for row in report['rows']] == [1, 0, 1]


def test_unknown_complex_is_a_schema_error(tmp_path):
    scene = write_scene(tmp_path, {'complex': 'klein_bottle'})
    assert run('homology', scene, tmp_path / 'out') == EXIT_SCHEMA


def test_fractional_alpha_keeps_a_flat_run_folder():
    uid = make_uid({'name': 'cone', 'seed': 5, 'alpha': '3/2', 'm': 1, 'k': 1},
                   'cone-threshold')
    assert '/' not in uid
    assert uid.endswith('-alpha3_2-m1-k1')
