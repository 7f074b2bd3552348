"""Numerical audits of second-fundamental-form and shape-operator inequalities
for contact CR-warped products in cosymplectic space forms."""

__version__ = "0.1.0"
