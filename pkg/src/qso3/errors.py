class CapacityError(ValueError):
    """Requested state or operator block lies beyond the Fock-space cutoff."""


class IntegrityError(RuntimeError):
    """Two routes that must agree produced different numbers."""
