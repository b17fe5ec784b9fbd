"""
Audit four Hardy marginals against the noncontextual bound P4 <= P1 + P2 + P3.

Marginals come from flags, from a JSON/CSV file, or from the quantum
prediction at an entanglement angle:

    python manage.py lhv --sigma-lambda-pp 0.021 --sigmap-lambda-mm 0.0045 \
        --sigma-lambdap-mm 0.010 --sigmap-lambdap-mm 0.074
    python manage.py lhv --input results/predict.json
    python manage.py lhv --gamma-deg 24.9
"""

import csv
import logging
from pathlib import Path

from paradox.cli import LabCommand, RunManifest, add_gamma_arguments, load_json_config, resolve_gamma
from paradox.conf import lab_setting
from paradox.errors import ConfigError, InvalidDistributionError
from paradox.hardy import HardyEvent, JointProbabilityTable
from paradox.noncontextual import (
    event_covered_structurally, inequality_gap, max_gap_linprog, max_gap_over_models, quantum_marginals,
)

logger = logging.getLogger(__name__)


def _flag(event: HardyEvent) -> str:
    return event.field_name.replace('_', '-')


def _read_marginals_file(path: Path) -> dict:
    if path.suffix.lower() == '.csv':
        try:
            with path.open(newline='', encoding='utf-8') as handle:
                rows = list(csv.reader(handle))
        except FileNotFoundError:
            raise ConfigError(f"Marginals file not found: {path}")
        values = {}
        for row in rows[1:]:
            if len(row) < 2:
                continue
            label = row[0].split(':', 1)[1] if row[0].startswith('hardy:') else row[0]
            try:
                HardyEvent.from_label(label)
            except KeyError:
                continue
            values[label] = row[1]
        return values

    data = load_json_config(path)
    # accept the output document of the predict command
    if isinstance(data.get('result'), dict):
        data = data['result'].get('hardy_probabilities', {})
    return data


class Command(LabCommand):
    help = 'Check Hardy marginals against the noncontextual hidden-variable bound'

    def add_command_arguments(self, parser):
        parser.add_argument('--input', default=None, help='JSON or CSV file with the four probabilities')
        for event in HardyEvent:
            parser.add_argument(f"--{_flag(event)}", type=float, default=None, help=f"P[{event.label}]")
        add_gamma_arguments(parser, required=False)

    def _marginals(self, options) -> JointProbabilityTable:
        gamma = resolve_gamma(options)
        flagged = {event: options[event.field_name] for event in HardyEvent if options[event.field_name] is not None}
        sources = [bool(flagged), options['input'] is not None, gamma is not None]
        if sum(sources) != 1:
            raise ConfigError("Give the marginals through exactly one of: flags, --input, --gamma-deg/--gamma-rad")

        if gamma is not None:
            return quantum_marginals(gamma, exploration=True)
        values = flagged if flagged else _read_marginals_file(Path(options['input']))
        try:
            return JointProbabilityTable.from_mapping({k: float(v) for k, v in values.items()})
        except KeyError as e:
            raise ConfigError(f"Unknown marginal label: {e.args[0]}")
        except (TypeError, ValueError) as e:
            if isinstance(e, InvalidDistributionError):
                raise
            raise ConfigError(f"Invalid marginal value: {e}")

    def run(self, options):
        table = self._marginals(options)
        gap = inequality_gap(table)
        bound = max_gap_over_models()
        satisfied = gap <= lab_setting('HARDYLAB_ZERO_TOLERANCE', 1e-12)

        result = {
            'marginals': table.as_dict(),
            'gap': gap,
            'satisfied': satisfied,
            'max_gap_over_models': bound.max_gap,
            'argmax_vertex': bound.argmax_vertex,
            'max_gap_linprog': max_gap_linprog(),
            'event_covered_structurally': event_covered_structurally(),
        }
        if satisfied:
            logger.info(f"✅ Noncontextual bound satisfied (gap {gap:.6f})")
        else:
            logger.info(f"❌ Noncontextual bound violated (gap {gap:.6f})")

        rows = [(label, value) for label, value in table.as_dict().items()]
        rows += [(key, result[key]) for key in ('gap', 'satisfied', 'max_gap_over_models', 'max_gap_linprog')]
        manifest = RunManifest.create('lhv', {'marginals': table.as_dict()}, options['seed'])
        self.emit(options, manifest, result, header=('quantity', 'value'), rows=rows)
