"""Generalized second-order logic over finite carriers."""
