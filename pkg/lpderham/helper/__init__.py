import os

from lpderham.helper.helper import ExperimentHelper


def get_helper(params, name, folder_path=None, logdir=None):
    folder_path = folder_path or os.path.join('runs', name)
    return ExperimentHelper(params=params, name=name, folder_path=folder_path, logdir=logdir)
