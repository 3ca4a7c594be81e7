"""Hot subset-lattice kernels.

``_speedups`` is the compiled variant, ``_pure`` the reference fallback; both
expose the same functions.  :mod:`pdsync.kernels` picks one at import.
"""
