import logging
import math

from paradox.cli import LabCommand, RunManifest, add_gamma_arguments, resolve_gamma
from paradox.hardy import (
    basis_state_probabilities, concurrence, hardy_density, hardy_p4_closed_form, hardy_probabilities,
)

logger = logging.getLogger(__name__)


class Command(LabCommand):
    help = 'Quantum predictions for the Hardy state at one entanglement angle'

    def add_command_arguments(self, parser):
        add_gamma_arguments(parser)

    def run(self, options):
        gamma = resolve_gamma(options)
        # exploration mode: gamma = 0 and pi/4 are allowed here
        hardy = hardy_probabilities(gamma, exploration=True)
        basis = basis_state_probabilities(gamma)

        result = {
            'gamma_rad': gamma,
            'gamma_deg': math.degrees(gamma),
            'hardy_probabilities': hardy.as_dict(),
            'basis_probabilities': basis,
            'p4_closed_form': hardy_p4_closed_form(gamma),
            'concurrence': concurrence(hardy_density(gamma)),
        }
        logger.info(f"📊 gamma={math.degrees(gamma):.4f} deg  P4={hardy.sigmap_lambdap_mm:.6f}")

        rows = [(f"hardy:{label}", value) for label, value in hardy.as_dict().items()]
        rows += [(f"basis:{label}", value) for label, value in basis.items()]
        rows += [('p4_closed_form', result['p4_closed_form']), ('concurrence', result['concurrence'])]

        manifest = RunManifest.create('predict', {'gamma': gamma}, options['seed'])
        self.emit(options, manifest, result, header=('quantity', 'value'), rows=rows)
