"""Closed-form figures of merit and parameter fits."""
