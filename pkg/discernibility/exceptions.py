#!/usr/bin/env python3
"""
Custom exceptions for the discernibility toolkit.
"""


class DiscernibilityError(Exception):
    """Base exception for all toolkit errors."""
    pass


class InvalidConfigurationError(DiscernibilityError, ValueError):
    """Raised for invalid configuration parameters."""
    pass


class ShapeError(DiscernibilityError, ValueError):
    """Raised when operator or state dimensions do not match."""
    pass


class CapacityError(DiscernibilityError):
    """Raised when a tensor product exceeds the configured maximum dimension."""
    pass


class SlotIndexError(DiscernibilityError, IndexError):
    """Raised for a tensor slot or particle label out of range."""
    pass


class ContractError(DiscernibilityError, ValueError):
    """Raised when an operation's precondition is violated."""
    pass


class DegenerateSpinError(ContractError):
    """Raised when a spin relation is requested for spin zero."""
    pass


class UnknownTheoremError(ContractError):
    """Raised for a theorem id outside 1..6 and SMS1..SMS3."""
    pass


class NumericalIntegrityError(DiscernibilityError, ArithmeticError):
    """Raised when a numeric cross-check fails (imaginary residue, closed form mismatch)."""
    pass


class EmptySectorError(DiscernibilityError):
    """Raised when a state has no component in the requested symmetry sector."""
    pass


class StateParseError(DiscernibilityError):
    """Raised for malformed state files."""
    pass


class StateValidationError(DiscernibilityError):
    """Raised when a state file violates an assembly-state invariant."""
    pass
