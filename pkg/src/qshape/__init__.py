"""qshape: derive shapes that provably hold on every result of a query.

Given a set of shapes constraining the graphs a CONSTRUCT query may be run
on, the analyzer produces a set of shapes that every possible result graph
is guaranteed to satisfy.  The package also ships the machinery used to
check itself: a tableau reasoner for the underlying description logic and a
brute-force oracle that enumerates small graphs.
"""

__version__ = "0.1.0"
