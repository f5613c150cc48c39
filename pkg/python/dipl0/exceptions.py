__all__ = [
    'Dipl0Error',
    'NonFiniteError',
    'StaleTapeError',
    'FusionGraphError',
]


class Dipl0Error(Exception):
    """Base class of every error raised by dipl0."""


class NonFiniteError(Dipl0Error):
    """
    A NaN or Inf showed up in an iterate.

    Parameters
    ----------
    step: str
        Name of the step that produced the value, e.g. ``'theta'`` or ``'dual'``.

    iteration: int or None
        Outer iteration index, if known.

    detail: str
        What was being computed, e.g. the offending weight.
    """

    def __init__(self, step, iteration=None, detail=''):
        self.step = step
        self.iteration = iteration
        self.detail = detail
        where = f'step={step}' if iteration is None else f'step={step}, iteration={iteration}'
        msg = f'non-finite values detected ({where})'
        if detail:
            msg = f'{msg}: {detail}'
        super(NonFiniteError, self).__init__(msg)


class StaleTapeError(Dipl0Error):
    """The tape was recorded against parameters that have since been updated."""


class FusionGraphError(Dipl0Error):
    """Fusion was requested on dead or non-adjacent groups."""
