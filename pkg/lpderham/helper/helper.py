import logging
import os

from tensorboardX import SummaryWriter

from lpderham.utils.utils import dumps_json

logger = logging.getLogger('logger')


class ExperimentHelper:
    """Owns the output folder of one run and everything written into it."""

    def __init__(self, params, name, folder_path, logdir=None):
        self.params = params
        self.name = name
        self.folder_path = folder_path
        try:
            os.makedirs(self.folder_path)
        except FileExistsError:
            logger.info('Folder already exists')
        self.writer = SummaryWriter(log_dir=os.path.join(logdir, name)) if logdir else None

        if not self.params.get('environment_name', False):
            self.params['environment_name'] = self.name
        self.params['folder_path'] = self.folder_path

    @property
    def seed(self):
        return self.params.get('seed')

    def path(self, filename):
        return os.path.join(self.folder_path, filename)

    def write_csv(self, frame, filename):
        """CSV preceded by a ``# seed=N`` line; floats to 17 significant digits."""
        with open(self.path(filename), 'w', newline='') as f:
            f.write(f'# seed={self.seed}\n')
            frame.to_csv(f, index=False, float_format='%.17g')
        logger.info(f'Wrote {filename} ({len(frame)} rows).')

    def write_json(self, obj, filename):
        with open(self.path(filename), 'w') as f:
            f.write(dumps_json(obj))
        logger.info(f'Wrote {filename}.')

    def write_report(self, frame, summary, stem, fmt):
        """The table as CSV plus the summary as JSON, or both in one JSON document."""
        if fmt == 'csv':
            if frame is not None:
                self.write_csv(frame, f'{stem}.csv')
            self.write_json(summary, f'{stem}_summary.json')
        else:
            report = dict(summary)
            report['seed'] = self.seed
            if frame is not None:
                report['rows'] = frame.to_dict(orient='records')
            self.write_json(report, f'{stem}.json')

    def plot(self, x, y, name):
        if self.writer is not None and y is not None:
            self.writer.add_scalar(tag=name, scalar_value=y, global_step=x)

    def close(self):
        if self.writer is not None:
            self.writer.flush()
            self.writer.close()
