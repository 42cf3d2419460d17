"""Piecewise formulas for the two reference solution tables."""

from fractions import Fraction


def golden1_y(m: int) -> Fraction:
    if m <= -1:
        return Fraction(95 * m + 111)
    if m == 0:
        return Fraction(43)
    return Fraction(11 * m + 111)


def golden1_z(m: int) -> Fraction:
    return Fraction(95 * m + 40) if m <= 0 else Fraction(89 * m - 117)


def golden2_y(m: int) -> Fraction:
    if m <= -8:
        return Fraction(85 * m - 81)
    if m == -7:
        return Fraction(-669)
    if m <= -1:
        return Fraction(115 * m + 131)
    if m == 0:
        return Fraction(43)
    if m <= 11:
        return Fraction(-9 * m + 131)
    return Fraction(9 * m - 72)


def golden2_z(m: int) -> Fraction:
    if m <= -7:
        return Fraction(85 * m - 147)
    if m <= 0:
        return Fraction(115 * m + 50)
    if m <= 11:
        return Fraction(109 * m - 147)
    if m == 12:
        return Fraction(1156)
    return Fraction(91 * m + 65)
