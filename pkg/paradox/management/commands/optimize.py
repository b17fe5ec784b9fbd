import logging
import math

from paradox.cli import LabCommand, RunManifest
from paradox.hardy import GOLDEN_RATIO_BOUND, OPTIMIZER_TOLERANCE, hardy_probabilities, optimal_gamma

logger = logging.getLogger(__name__)


class Command(LabCommand):
    help = 'Entanglement angle maximizing the Hardy probability'

    def add_command_arguments(self, parser):
        parser.add_argument('--tolerance', type=float, default=OPTIMIZER_TOLERANCE,
                            help='Final bracket width in radians')

    def run(self, options):
        gamma_star, p_star = optimal_gamma(options['tolerance'])
        born = hardy_probabilities(gamma_star).sigmap_lambdap_mm

        result = {
            'gamma_star_rad': gamma_star,
            'gamma_star_deg': math.degrees(gamma_star),
            'p_star': p_star,
            'golden_ratio_bound': GOLDEN_RATIO_BOUND,
            'closed_form_difference': p_star - GOLDEN_RATIO_BOUND,
            'born_rule_p4': born,
        }
        logger.info(f"🎯 gamma*={math.degrees(gamma_star):.4f} deg  p*={p_star:.8f}")

        manifest = RunManifest.create('optimize', {'tolerance': options['tolerance']}, options['seed'])
        self.emit(options, manifest, result, header=('quantity', 'value'), rows=list(result.items()))
