"""
Shared plumbing for the laboratory management commands: angle flags,
config loading, run manifests, JSON/CSV writers and the mapping from
library errors onto exit codes (2 usage/config, 1 runtime).
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Iterable, Optional, Sequence

import numpy as np
from django.core.management.base import BaseCommand, CommandError
from django.utils import timezone

from .conf import lab_setting
from .errors import (
    ConfigError, GammaRangeError, HardyLabError, InvalidDistributionError, MissingLabelError,
    NoiseParameterError,
)

logger = logging.getLogger(__name__)


USAGE_ERRORS = (ConfigError, GammaRangeError, InvalidDistributionError, MissingLabelError, NoiseParameterError)
FORMATS = ('json', 'csv')


@dataclass(frozen=True)
class RunManifest:
    command: str
    config: Dict[str, Any]
    seed: Optional[int]
    version: str
    timestamp: str

    @classmethod
    def create(cls, command: str, config: Dict[str, Any], seed: Optional[int] = None) -> 'RunManifest':
        return cls(
            command=command,
            config=config,
            seed=seed,
            version=lab_setting('HARDYLAB_VERSION', '0'),
            timestamp=timezone.now().isoformat(),
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            'command': self.command,
            'config': self.config,
            'seed': self.seed,
            'version': self.version,
            'timestamp': self.timestamp,
        }


def _jsonable(value):
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, complex):
        return [value.real, value.imag]
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


def dumps(payload: Dict[str, Any]) -> str:
    return json.dumps(payload, indent=2, sort_keys=True, default=_jsonable) + '\n'


def complex_matrix(m: np.ndarray) -> list:
    """Row-major matrix of [re, im] pairs"""
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m)]


def add_gamma_arguments(parser, required: bool = True):
    group = parser.add_mutually_exclusive_group(required=required)
    group.add_argument('--gamma-deg', type=float, help='Entanglement angle in degrees')
    group.add_argument('--gamma-rad', type=float, help='Entanglement angle in radians')


def resolve_gamma(options: Dict[str, Any]) -> Optional[float]:
    deg, rad = options.get('gamma_deg'), options.get('gamma_rad')
    if deg is not None and rad is not None:
        raise ConfigError("Give either --gamma-deg or --gamma-rad, not both")
    value = math.radians(deg) if deg is not None else rad
    if value is not None and not math.isfinite(value):
        raise GammaRangeError(f"gamma must be finite, got {value!r}")
    return value


def load_json_config(path) -> Dict[str, Any]:
    path = Path(path)
    try:
        text = path.read_text(encoding='utf-8')
    except FileNotFoundError:
        raise ConfigError(f"Config file not found: {path}")
    except OSError as e:
        raise ConfigError(f"Cannot read config file {path}: {e}")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"Invalid JSON in {path}: {e.msg}", line=e.lineno, column=e.colno)
    if not isinstance(data, dict):
        raise ConfigError(f"Config in {path} must be a JSON object")
    return data


def csv_text(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buffer.getvalue()


def write_json(path: Path, manifest: RunManifest, result: Dict[str, Any]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps({'manifest': manifest.to_dict(), 'result': result}), encoding='utf-8')
    return path


def write_csv(path: Path, manifest: RunManifest, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    """CSV payload plus a '<name>.manifest.json' sidecar."""
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(csv_text(header, rows), encoding='utf-8')
    sidecar = path.with_name(f"{path.stem}.manifest.json")
    sidecar.write_text(dumps(manifest.to_dict()), encoding='utf-8')
    return path


def output_directory(option: Optional[str]) -> Path:
    return Path(option or lab_setting('HARDYLAB_OUTPUT_DIR', 'results'))


class LabCommand(BaseCommand):
    """
    Base for laboratory commands.

    Subclasses implement add_command_arguments() and run(); every command
    gets --seed, --output and --format.
    """

    def add_arguments(self, parser):
        parser.add_argument(
            '--seed', type=int, default=None,
            help='Random seed; deterministic commands only record it in the manifest',
        )
        parser.add_argument('--output', default=None, help='Output path')
        parser.add_argument('--format', choices=FORMATS, default='json', help='Output format')
        self.add_command_arguments(parser)

    def add_command_arguments(self, parser):
        pass

    def run(self, options: Dict[str, Any]):
        raise NotImplementedError

    def handle(self, *args, **options):
        try:
            self.run(options)
        except USAGE_ERRORS as e:
            message = e.args[0] if e.args else str(e)
            logger.error(f"❌ {message}")
            raise CommandError(message, returncode=2)
        except HardyLabError as e:
            logger.error(f"❌ {e}")
            raise CommandError(str(e), returncode=1)

    def emit(self, options, manifest: RunManifest, result: Dict[str, Any], header=None, rows=None):
        """Write to --output when given, else to stdout."""
        output = options.get('output')
        if options.get('format') == 'csv':
            if header is None:
                raise ConfigError(f"{manifest.command} has no CSV representation")
            if output:
                path = write_csv(Path(output), manifest, header, rows)
                logger.info(f"💾 Wrote {path}")
            else:
                self.stdout.write(csv_text(header, rows), ending='')
            return
        if output:
            path = write_json(Path(output), manifest, result)
            logger.info(f"💾 Wrote {path}")
        else:
            self.stdout.write(dumps({'manifest': manifest.to_dict(), 'result': result}), ending='')
