"""Hot-loop propagation kernels.

Imports the compiled Cython core when available, otherwise the
pure-Python fallback with identical semantics. `BACKEND` reports which
one is active; benchmarks/bench_kernels.py compares both.
"""

try:
    from ._core import BACKEND, body_steps, pendulum_steps
except ImportError:  # compiled extension not built
    from ._core_py import BACKEND, body_steps, pendulum_steps

__all__ = ["BACKEND", "body_steps", "pendulum_steps"]
