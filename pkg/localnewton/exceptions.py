__all__ = '''
    LocalNewtonError DatasetError ParseError ConfigError SolverError CGError
    LineSearchError DescentDirectionError DivergenceError SingularSystemError
    WorkerError BoundsError RunError LocalNewtonWarning LineSearchWarning
    LossIncreaseWarning'''.split()
__all__.sort()

class LocalNewtonError(Exception):
    'Base class for all localnewton errors'

class DatasetError(LocalNewtonError):
    'Raised when a dataset is malformed, empty, or cannot be partitioned as requested'

class ParseError(DatasetError):
    'Raised when a LIBSVM line cannot be parsed; ``line`` is 1-based'
    def __init__(self, message, line=None, token=None):
        DatasetError.__init__(self, message)
        self.line = line
        self.token = token

class ConfigError(LocalNewtonError):
    'Raised when an experiment or solver configuration is invalid or incomplete'

class SolverError(LocalNewtonError):
    'Base class for numerical failures inside an optimizer'

class CGError(SolverError):
    'Raised when conjugate gradients meets a non-finite value or non-positive curvature'

class LineSearchError(SolverError):
    'Raised when backtracking runs out of trials; ``alpha`` is the last step tried'
    def __init__(self, message, alpha=None):
        SolverError.__init__(self, message)
        self.alpha = alpha

class DescentDirectionError(LineSearchError):
    'Raised when a line search is handed a direction with p.g <= 0'

class DivergenceError(SolverError):
    'Raised when an iterate stops being finite'

class SingularSystemError(SolverError):
    'Raised when a dense normal-equations solve is singular'

class WorkerError(SolverError):
    'Raised when a simulated worker fails; carries the worker id and the original error'
    def __init__(self, worker_id, cause):
        SolverError.__init__(self, "worker %d: %s"%(worker_id, cause))
        self.worker_id = worker_id
        self.cause = cause

class BoundsError(LocalNewtonError):
    'Raised when curvature bounds are invalid for the formula they are fed to'

class LocalNewtonWarning(RuntimeWarning):
    'Base class for localnewton warnings'

class LineSearchWarning(LocalNewtonWarning):
    'Issued when no candidate of a distributed line search passes and the smallest is used'

class LossIncreaseWarning(LocalNewtonWarning):
    'Issued when the averaged training loss goes up by a tiny amount between rounds'

class RunError(LocalNewtonError):
    'Raised by the harness when a run fails; ``round`` is the last completed communication round'
    def __init__(self, round, cause):
        LocalNewtonError.__init__(self, "round %d: %s"%(round, cause))
        self.round = round
        self.cause = cause
