"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument is outside the mathematical domain of an operation."""


class ConeError(ValueError):
    """A curvature vector left the Garding cone required by the operation."""


class SpacelikeError(ValueError):
    """A hypersurface node violates the spacelike condition w^2 > 0."""

    def __init__(self, node, w2):
        self.node = node
        self.w2 = w2
        super().__init__(f"non-spacelike node {node}: w^2 = {w2:.6e}")


class FlowAbort(RuntimeError):
    """The time integrator had to give up (cone/spacelike violation, NaN, ...)."""

    def __init__(self, reason, node=None, quantity=None):
        self.reason = reason
        self.node = node
        self.quantity = quantity
        msg = reason
        if node is not None:
            msg += f" at node {node}"
        if quantity is not None:
            msg += f" ({quantity})"
        super().__init__(msg)
