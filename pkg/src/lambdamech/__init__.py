"""Converting between variable-indexed and ordinal-indexed arguments, in three calculi.

``core`` holds the tuple conversions; ``lam``, ``logic`` and ``flowchart``
are the lambda calculus, first-order logic with predicate extensions, and
flowcharts with call-by-name procedures.
"""

__version__ = "0.1.0"
