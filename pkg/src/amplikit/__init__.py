"""Biased-coin amplification toolkit.

Subsystems:
  bandit    -- the biased-coin engine (gap, sliding-threshold and grouped variants)
  maxcut    -- dense Max-Cut via sampled seed cuts
  clique    -- approximate clique via sampled sub-cliques, sketch and OVCCT verifier
  freegame  -- labeling solver for free games plus the game sketch
  rm        -- Reed-Muller list-to-unique decoding over prime fields
  harness   -- planted-instance generators, repeat-and-combine, suite runner
"""

from .errors import AmplikitError, BudgetExceeded, NotFound

__version__ = "0.1.0"

__all__ = ["AmplikitError", "BudgetExceeded", "NotFound", "__version__"]
