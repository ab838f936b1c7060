"""Pedestrian motion prediction toolkit.

Social-forces crowd simulation, agent-centered grid encoders, a recurrent
interaction-aware motion predictor, classic baselines and an evaluation
harness, plus file formats, a CLI pipeline and an inference service.
"""

__version__ = "0.1.0"
