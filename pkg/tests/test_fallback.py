import os
import subprocess
import sys


def test_pure_python_switch():
    env = dict(os.environ, PHASE_CONTRACT_PURE_PYTHON="1")
    code = ("from phase_contract._backend import kernels; from phase_contract import clebsch_gordan_float; "
            "print(kernels.BACKEND, clebsch_gordan_float(1, 1, 1, -1, 0, 0))")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True).stdout
    backend, value = out.split()
    assert backend == "python"
    assert abs(float(value) - 3**-0.5) < 1e-15
