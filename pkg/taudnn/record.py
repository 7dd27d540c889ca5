'''
record.py: per-step training records

A TrainRecord keeps one StepRow per accepted descent step.  Its column list
is fixed: step, J, mse, alpha, tau_0 .. tau_{L-2}, gnorm_W, gnorm_b,
gnorm_tau.  Values are written with Python's shortest round-trip float
representation, so two identical runs produce identical files.

Authors
-------

The taudnn developers

Copyright
---------

Copyright (c) 2022 by the taudnn authors.  This code is open-source software
released under a 3-clause BSD license.  Please see the file "LICENSE" for
more information.
'''

from   dataclasses import dataclass
import csv


# Class definitions.
# .............................................................................

@dataclass(frozen = True)
class StepRow:
    '''State after one accepted step.  The gradient norms are those of the
    gradient the step was taken along.
    '''
    step: int
    J: float
    mse: float
    alpha: float
    taus: tuple
    gnorm_W: float
    gnorm_b: float
    gnorm_tau: float


class TrainRecord(object):
    '''Rows of a training run, plus the objective at the starting point and
    the reason the run ended.'''

    def __init__(self, n_taus, initial_J = None, initial_mse = None):
        self.n_taus = n_taus
        self.initial_J = initial_J
        self.initial_mse = initial_mse
        self.rows = []
        self.stopped = 'max_steps'


    def __repr__(self):
        return '<{} {} steps>'.format(self.__class__.__name__, len(self.rows))


    def __len__(self):
        return len(self.rows)


    def __eq__(self, other):
        return (self.__class__ == other.__class__ and self.rows == other.rows
                and self.initial_J == other.initial_J and self.stopped == other.stopped)


    def append(self, row):
        self.rows.append(row)


    def J_values(self):
        return [row.J for row in self.rows]


    def columns(self):
        '''Column names of the metrics CSV.'''
        taus = ['tau_{}'.format(l) for l in range(self.n_taus)]
        return ['step', 'J', 'mse', 'alpha'] + taus + ['gnorm_W', 'gnorm_b', 'gnorm_tau']


    def as_rows(self):
        '''Rows of strings in the order of columns().'''
        out = []
        for row in self.rows:
            values = [row.J, row.mse, row.alpha] + list(row.taus)
            values += [row.gnorm_W, row.gnorm_b, row.gnorm_tau]
            out.append([str(row.step)] + [repr(float(v)) for v in values])
        return out


    def write_csv(self, dest):
        '''Write the metrics to the file 'dest'.'''
        with open(dest, 'w', newline = '') as f:
            sheet = csv.writer(f, delimiter = ',', lineterminator = '\n')
            sheet.writerow(self.columns())
            sheet.writerows(self.as_rows())
