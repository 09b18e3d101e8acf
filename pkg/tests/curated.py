"""The curated bounded-sentence suite with analytically known truth values.

Each entry is (name, source text, expected verdict, alternation count of the
quantifier prefix).  Truth values were established by hand analysis:

* `inverse_product`: y*(x*y - 1) = 0 needs x = 1/y for y != 0, and 1/y leaves
  [-5, 5] as soon as 0 < |y| < 1/5, so the boxed sentence is false (for the
  unbounded version the witness exists and the sentence is true; no finite
  box preserves that).
* `plain_inverse`: x*y - 1 = 0 fails at y = 0 outright.
* `squares_chain`: the unique solution is x_i = 2^(2^i).
* `corner_sum`: x + y = 3 with x <= 2 and y <= 1 forces x = 2, y = 1, but
  universally quantified y < 1 breaks it, e.g. y = 7/8 needs x = 17/8 > 2.
"""

from fractions import Fraction

CURATED = [
    ("unit_witness", "exists x in [1/2,2]. x = 1", "True", 0),
    ("inverse_product", "forall y in [-5,5]. exists x in [-5,5]. y*(x*y - 1) = 0", "False", 1),
    ("plain_inverse", "forall y in [-5,5]. exists x in [-5,5]. x*y - 1 = 0", "False", 1),
    (
        "squares_chain",
        "exists x0 in [0,3] exists x1 in [0,5] exists x2 in [0,17] exists x3 in [0,257]."
        " x0 = 2 and x1 = x0^2 and x2 = x1^2 and x3 = x2^2",
        "True",
        0,
    ),
    ("sqrt2_out_of_range", "exists x in [0,1]. x*x = 2", "False", 0),
    ("positive_box", "forall y in [3/4,1]. y > 0", "True", 0),
    (
        "uniform_witness",
        "forall y in [-2,2]. exists x in [-2,2]. x*y >= 0 and x <= 1",
        "True",
        1,
    ),
    (
        "dominating_square",
        "exists x in [-3,3]. forall y in [-1,1]. x*x >= y*y and x >= 2",
        "True",
        1,
    ),
    ("corner_sum", "forall y in [3/4,1]. exists x in [1/2,2]. x + y = 3", "False", 1),
    (
        "inverse_pair",
        "exists x in [1/2,2] exists y in [1/2,2]. x*y = 1 and 2*x + 2*y = 5",
        "True",
        0,
    ),
    ("negative_root", "exists x in [-2,-1]. x*x = 4", "True", 0),
    ("square_cap", "forall x in [-1,1]. x*x <= 1", "True", 0),
]

assert len(CURATED) == 12
