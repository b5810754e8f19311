"""Stand-alone BBO ordinary index at 800 nm from the published Sellmeier
coefficients (Tamosauskas et al., Opt. Mater. Express 8, 1410 (2018)).

Deliberately does not import the package. Run directly to print the value.
"""
import math


def bbo_no(lam_um):
    l2 = lam_um ** 2
    n2 = (1 + 0.90291 * l2 / (l2 - 0.003926) + 0.83155 * l2 / (l2 - 0.018786)
          + 0.76536 * l2 / (l2 - 60.01))
    return math.sqrt(n2)


def bbo_ne(lam_um):
    l2 = lam_um ** 2
    n2 = (1 + 1.151075 * l2 / (l2 - 0.007142) + 0.21803 * l2 / (l2 - 0.02259)
          + 0.656 * l2 / (l2 - 263.0))
    return math.sqrt(n2)


if __name__ == "__main__":
    print(f"n_o(0.8 um) = {bbo_no(0.8):.6f}")
    print(f"n_e(0.8 um) = {bbo_ne(0.8):.6f}")
