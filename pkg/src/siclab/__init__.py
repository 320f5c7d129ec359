"""siclab: a simulation laboratory for coding with side information.

Four schemes are implemented and validated empirically:

* feedback coding over the Gaussian channel with additive interference
  known at the encoder (``dirty_paper``),
* Gaussian lossy coding with decoder feedforward, with and without side
  information (``wz_gaussian``),
* an iterative finite-alphabet channel protocol that writes over a known
  state using feedback (``gp_finite``),
* an iterative finite-alphabet source protocol using decoder feedforward
  (``wz_finite``),

backed by exact finite-alphabet information measures (``finite_info``)
and seeded random-binning codecs with typicality decoding (``sw_codecs``).
The ``harness`` and ``cli`` modules drive seeded Monte Carlo experiments
and write CSV tables, sidecar metadata, and rendered figures.
"""

__version__ = "0.1.0"
