"""Driving the command-line tool from Python.

Every subcommand returns an exit code (0 all verdicts hold, 1 some verdict
failed, 2 unreadable input, 3 invalid input) and prints a JSON or text report.
"""
import json
import pathlib
import tempfile

from unistoch.cli import main

here = pathlib.Path(__file__).parent

print("Scenario run:")
code = main(["run", str(here / "demo_scenario.json"), "--format", "text", "--no-timing"])
print("exit code", code)

with tempfile.TemporaryDirectory() as tmp:
    path = pathlib.Path(tmp) / "m.json"
    # A matrix literal: bare numbers are real, [re, im] pairs are complex.
    path.write_text(json.dumps([[0.0, [0.0, -1.0]], [[0.0, 1.0], 0.0]]))
    print("\nIs sigma_y unitary?")
    print("exit code", main(["validate", "--matrix", str(path), "--check", "unitary", "--format", "text"]))
    print("\nIs sigma_y positive semidefinite?")
    print("exit code", main(["validate", "--matrix", str(path), "--check", "psd", "--format", "text"]))
