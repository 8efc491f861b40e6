"""Exception types shared across the package.

Kept in one flat module so that subsystems can raise each other's errors
(reaction application reports pattern errors, the environment reports
budget errors) without import cycles.
"""

from __future__ import annotations


class RxnleadError(Exception):
    """Base class for every error raised by this package."""


# --- molecule parsing and perception ---


class SmilesSyntaxError(RxnleadError, ValueError):
    """The SMILES text is malformed."""


class RingClosureError(SmilesSyntaxError):
    """A ring-closure digit is unmatched or reused inconsistently."""


class ValenceError(RxnleadError, ValueError):
    """An atom's bond-order sum plus hydrogens is outside its allowed set."""


# --- pattern compilation and matching ---


class SmartsSyntaxError(RxnleadError, ValueError):
    """The SMARTS text is malformed."""


class UnsupportedFeatureError(SmartsSyntaxError):
    """The SMARTS uses syntax outside the supported subset."""


# --- reaction templates ---


class TemplateFormatError(RxnleadError, ValueError):
    """A template record is malformed or violates library rules."""


class NoEmbeddingError(RxnleadError):
    """A reactant does not match its slot pattern."""


class NoValidProductError(RxnleadError):
    """Every embedding combination produced an invalid product."""


# --- fingerprints ---


class ParameterMismatchError(RxnleadError, ValueError):
    """Fingerprints built with different widths or radii were compared."""


# --- oracles and budget ---


class OracleSpecError(RxnleadError, ValueError):
    """An oracle specification is malformed."""


class BudgetExhaustedError(RxnleadError):
    """An oracle call was attempted past the configured budget."""


# --- environment and proposers ---


class InvalidActionError(RxnleadError, ValueError):
    """An action outside the current action space was applied."""


class ProposerError(RxnleadError):
    """Base class for proposer transport failures."""


class ProposerTimeoutError(ProposerError):
    """The remote proposer did not answer within the timeout."""


class ProposerProtocolError(ProposerError):
    """The remote proposer answered with a malformed payload."""


class ProposerUnavailableError(ProposerError):
    """The remote proposer endpoint could not be reached."""


class CacheCorruptionError(RxnleadError):
    """A persisted action-space record failed validation on load."""


# --- training ---


class NonFiniteLossError(RxnleadError, FloatingPointError):
    """The training loss or one of its gradients became non-finite."""


class CheckpointMismatchError(RxnleadError, ValueError):
    """A checkpoint's recorded dimensions disagree with the config."""


# --- evaluation and reporting ---


class EmptyHistoryError(RxnleadError, ValueError):
    """A metric was requested over an empty evaluation history."""


class TooFewMoleculesError(RxnleadError, ValueError):
    """Internal diversity needs at least two molecules."""


class ReplayMismatchError(RxnleadError):
    """Replaying an exported pathway did not reproduce the recorded product."""


class ConfigError(RxnleadError, ValueError):
    """A run configuration file is missing fields or inconsistent."""
