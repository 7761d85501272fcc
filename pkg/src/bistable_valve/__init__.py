"""Energy model, design tools and virtual test bench for a bistable soft valve."""

from .curves import (ValveCharacteristic, characterize, energy_from_pressure_roundtrip,
                     pressure_curve, total_energy_curve)
from .errors import (EventNotFoundError, ModelDomainError, NeverSwitchedError, NoBucklingError,
                     NonMonotoneError, TargetUnreachableError)
from .explorer import InverseResult, SweepResult, SweepSpec, invert_design, run_sweep
from .materials import DEFAULT_TABLE, HardnessTable, MaterialModel, load_table, modulus_for_hardness
from .shell import BucklingSolution, ShellGeometry, critical_buckling_force, strain_energy

__version__ = "0.1.0"

__all__ = [
    "BucklingSolution", "DEFAULT_TABLE", "EventNotFoundError", "HardnessTable", "InverseResult",
    "MaterialModel", "ModelDomainError", "NeverSwitchedError", "NoBucklingError", "NonMonotoneError",
    "ShellGeometry", "SweepResult", "SweepSpec", "TargetUnreachableError", "ValveCharacteristic",
    "characterize", "critical_buckling_force", "energy_from_pressure_roundtrip", "invert_design",
    "load_table", "modulus_for_hardness", "pressure_curve", "run_sweep", "strain_energy",
    "total_energy_curve",
]
