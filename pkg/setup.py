# ~~ Generated by projen. To modify, edit .projenrc.py and run "npx projen".

import json
from setuptools import setup

kwargs = json.loads(
    """
{
    "name": "fifaug",
    "description": "Fractal interpolation for time-series augmentation and forecasting",
    "python_requires": ">=3.8",
    "version": "0.1.0",
    "packages": [
        "fifaug",
        "fifaug._private",
        "fifaug.storage"
    ],
    "install_requires": [
        "numpy>=1.21.0, <3.0.0",
        "scipy>=1.7.0, <2.0.0"
    ],
    "entry_points": {
        "console_scripts": [
            "fifaug=fifaug.cli:main"
        ]
    }
}
"""
)

setup(**kwargs)
