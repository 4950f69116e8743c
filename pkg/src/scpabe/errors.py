"""Exception taxonomy shared across the library.

The CLI maps these onto process exit codes, so the split matters:
validation/format problems are the caller's fault (exit 2), crypto and
integrity failures mean key material or ciphertext is wrong (exit 3), and
a key that simply opens nothing is its own condition (exit 4).
"""


class SCPABEError(Exception):
    """Base class for all library errors."""


class ValidationError(SCPABEError):
    """A lattice, policy document, or argument failed validation."""


class FormatError(SCPABEError):
    """A serialized envelope, manifest, or element could not be parsed."""


class ProviderMismatchError(SCPABEError):
    """Group elements or key material from different providers were mixed."""


class CryptoError(SCPABEError):
    """Key material is inconsistent with the operation being attempted."""


class IntegrityError(SCPABEError):
    """Authenticated decryption failed on data the key should open."""


class NotEntitledError(SCPABEError):
    """The key satisfies no layer policy of the package."""
