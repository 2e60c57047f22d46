"""
MassReport: one evaluator's result for one metric, ready for JSON or CSV.
"""

import logging
from dataclasses import dataclass, field
from typing import Optional

from mass.constants import constants_table

logger = logging.getLogger(__name__)

CSV_HEADER = ('evaluator', 'radius', 'flux')


@dataclass
class MassReport:
    spec: object
    estimate: object
    lower_bound: Optional[object] = None
    audit: Optional[object] = None
    hypotheses: dict = field(default_factory=dict)

    @property
    def evaluator(self):
        return self.estimate.evaluator

    @property
    def within_oracle(self):
        """|limit - m^k| <= max(1% m^k, error) for catalog metrics, None otherwise."""
        expected = self.spec.expected_mass
        if expected is None:
            return None
        return abs(self.estimate.limit - expected) <= max(0.01 * abs(expected), self.estimate.error)

    def to_dict(self):
        spec = self.spec
        data = {
            'label': spec.label,
            'n': spec.n,
            'k': spec.k,
            'evaluator': self.evaluator,
            'radii': list(self.estimate.radii),
            'flux': list(self.estimate.values),
            'mass': self.estimate.limit,
            'error': self.estimate.error,
            'exponent': self.estimate.exponent,
            'low_confidence': self.estimate.low_confidence,
            'constants': constants_table(spec.n, spec.k),
            'hypotheses': {
                'tau': spec.tau,
                'decay_threshold': spec.decay_threshold,
                'well_defined': spec.is_well_defined,
                **self.hypotheses,
            },
        }
        if spec.expected_mass is not None:
            data['expected_mass'] = spec.expected_mass
            data['within_oracle'] = self.within_oracle
        if self.lower_bound is not None:
            data['lower_bound'] = self.lower_bound.to_dict()
            data['hypotheses']['lj_nonnegative'] = self.lower_bound.hypothesis_ok
        if self.audit is not None:
            data['hypotheses']['positivity'] = self.audit.to_dict()
        return data

    def csv_rows(self):
        return [(self.evaluator, r, v) for r, v in zip(self.estimate.radii, self.estimate.values)]
