import json
import math
import os
import random

import numpy as np
from joblib import Parallel, delayed

THREADS_ENV_VAR = 'DERHAM_THREADS'


def reseed(seed=5):
    """Seed the global generators and return a fresh numpy Generator."""
    random.seed(seed)
    np.random.seed(seed)
    return np.random.default_rng(seed)


def thread_count():
    """Parallelism cap read from DERHAM_THREADS (default 1)."""
    raw = os.environ.get(THREADS_ENV_VAR, '1')
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f'{THREADS_ENV_VAR} must be an integer, got {raw!r}')
    return max(1, value)


def parallel_map(fn, items, n_jobs=None):
    """Apply fn to every item, in order; threads only when n_jobs > 1."""
    items = list(items)
    n_jobs = thread_count() if n_jobs is None else n_jobs
    if n_jobs <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    return Parallel(n_jobs=n_jobs, prefer='threads')(delayed(fn)(item) for item in items)


def create_table(params: dict):
    keys = [x for x in params.keys() if x != 'folder_path']
    header = f"| {' | '.join([x[:12] for x in keys])} |"
    line = f"|{'|:'.join([3 * '-' for _ in range(len(keys))])}|"
    values = f"| {' | '.join([str(params[x]) for x in keys])} |"
    return '\n'.join([header, line, values])


def format_float(x):
    if math.isnan(x):
        return 'NaN'
    if math.isinf(x):
        return 'Infinity' if x > 0 else '-Infinity'
    return format(x, '.17g')


def _encode(obj, indent, level):
    pad = ' ' * (indent * (level + 1))
    end = ' ' * (indent * level)
    if isinstance(obj, (bool, np.bool_)):
        return 'true' if obj else 'false'
    if obj is None:
        return 'null'
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return '{}'
        items = [f'{pad}{json.dumps(str(k))}: {_encode(v, indent, level + 1)}'
                 for k, v in obj.items()]
        return '{\n' + ',\n'.join(items) + '\n' + end + '}'
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return '[]'
        items = [f'{pad}{_encode(v, indent, level + 1)}' for v in obj]
        return '[\n' + ',\n'.join(items) + '\n' + end + ']'
    raise TypeError(f'Cannot encode object of type {type(obj).__name__}')


def dumps_json(obj, indent=2):
    """JSON text with every float printed to 17 significant digits."""
    return _encode(obj, indent, 0) + '\n'
