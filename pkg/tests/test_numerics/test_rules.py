"""Tests for fixed composite rules."""
import numpy as np

from szego_borel.numerics.quadrature import ContourSegment
from szego_borel.numerics.rules import FixedRule, graded_breaks


def test_fixed_rule_polynomial():
    rule = FixedRule.on_segment(ContourSegment.segment(0, 1), [0.0, 0.5, 1.0])
    assert len(rule) == 30
    value, err = rule.integrate(rule.nodes ** 2)
    assert abs(value - 1.0 / 3.0) < 1e-15
    assert err < 1e-14


def test_fixed_rule_many_integrands():
    rule = FixedRule.on_segment(ContourSegment.segment(0, 2), np.linspace(0, 1, 5))
    values = np.stack([np.ones_like(rule.nodes), rule.nodes, np.exp(rule.nodes)])
    sums, _ = rule.integrate(values)
    assert np.allclose(sums, [2.0, 2.0, np.e ** 2 - 1], rtol=1e-13)


def test_mapped_and_concat():
    seg = ContourSegment.segment(0, 1)
    rule = FixedRule.concat([FixedRule.on_segment(seg, [0.0, 1.0])] * 2)
    assert len(rule) == 30
    doubled = FixedRule.on_segment(seg, [0.0, 1.0]).mapped(lambda z: 2 * z, lambda z: 2 + 0 * z)
    value, _ = doubled.integrate(np.ones(len(doubled)))
    assert abs(value - 2.0) < 1e-14


def test_graded_breaks():
    breaks = graded_breaks(0.0, 10.0, 0.1, 1.5, 2.0)
    assert breaks[0] == 0.0 and breaks[-1] == 10.0
    widths = np.diff(breaks)
    assert np.all(widths > 0)
    assert widths.max() <= 2.0
