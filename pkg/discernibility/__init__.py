#!/usr/bin/env python3
"""
Weak-Discernibility Toolkit

Finite-dimensional checks of which relations discern indistinguishable
quantum particles, under which interpretive postulate, and whether the
operators those relations are built from are physical.
"""

# Configure logging
import logging
import os
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv(encoding='utf-8-sig')

# Set up a default logger
logging.basicConfig(
    level=os.getenv('DISCERN_LOG_LEVEL', 'INFO').upper(),
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)

# Public API for the discernibility package
from .config import LatticeConfig, RunConfig, Settings, SpinConfig, TheoremConfig, Tolerance
from .discernment import RelationSpec, classify, discern, physicality_audit
from .exceptions import (
    CapacityError,
    ContractError,
    DegenerateSpinError,
    DiscernibilityError,
    EmptySectorError,
    InvalidConfigurationError,
    NumericalIntegrityError,
    ShapeError,
    SlotIndexError,
    StateParseError,
    StateValidationError,
    UnknownTheoremError,
)
from .hilbert import AssemblyState, Operator, embed_single, expectation, partial_trace, tensor
from .manager import DiscernmentManager
from .models import (
    AuditVerdict,
    DiscernmentReport,
    PhysicalityAudit,
    RelationKind,
    SectorLabel,
    TheoremReport,
    Verdict,
)
from .states import load_state, random_states, save_state
from .theorems import verify_theorem
from .utils import display_report

__all__ = [
    "LatticeConfig",
    "RunConfig",
    "Settings",
    "SpinConfig",
    "TheoremConfig",
    "Tolerance",
    "RelationSpec",
    "classify",
    "discern",
    "physicality_audit",
    "AssemblyState",
    "Operator",
    "embed_single",
    "expectation",
    "partial_trace",
    "tensor",
    "DiscernmentManager",
    "AuditVerdict",
    "DiscernmentReport",
    "PhysicalityAudit",
    "RelationKind",
    "SectorLabel",
    "TheoremReport",
    "Verdict",
    "load_state",
    "random_states",
    "save_state",
    "verify_theorem",
    "display_report",
    "DiscernibilityError",
    "InvalidConfigurationError",
    "ShapeError",
    "CapacityError",
    "SlotIndexError",
    "ContractError",
    "DegenerateSpinError",
    "UnknownTheoremError",
    "NumericalIntegrityError",
    "EmptySectorError",
    "StateParseError",
    "StateValidationError",
]

__version__ = "1.0.0"
