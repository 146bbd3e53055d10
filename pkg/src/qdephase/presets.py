"""Named parameter sets reproducing the published figure panels.

Each preset is a small configuration (see :mod:`qdephase.config`); most hold one
experiment section, a few hold one section per curve.
"""

from qdephase.config import parse_config
from qdephase.errors import ConfigError

MC_SEED = 20250101

_FIT_OMEGA0 = "0.01, 0.03, 0.05, 0.0629"


def _gamma(omega0, t_max, fitted=False, omegaJ=50):
    return f"""
[gamma]
kind = gamma
alpha = 0.5
omegaJ = {omegaJ}
omega0 = {omega0}
t_max = {t_max}
fitted = {"true" if fitted else "false"}
"""


def _scan(t_max, lo, hi):
    return f"""
[blp_scan]
kind = nonmarkov-scan
alpha = 0.5
omegaJ = 50
t_max = {t_max}
omega0_min = {lo}
omega0_max = {hi}
omega0_points = 181
"""


def _coherence(basis, omega0, omega_k, t_max, alpha=0.5, name="coherence"):
    return f"""
[{name}]
kind = coherence
basis = {basis}
alpha = {alpha}
omegaJ = 50
omega0 = {omega0}
omega_k = {omega_k}
t_max = {t_max}
ensemble = 500
seed = {MC_SEED}
"""


def _longterm(omega0, omega_k):
    return f"""
[longterm]
kind = longterm
omegaJ = 50
omega0 = {omega0}
omega_k = {omega_k}
alpha_min = 0
alpha_max = 4
alpha_step = 0.1
"""


PRESETS = {
    "fig1a": ("Gamma(t) completing 1, 2 and 3 periods on [0, 100] ms",
              _gamma("0.06285, 0.1258, 0.2514", 100)),
    "fig1b": ("exact versus fitted Gamma(t), omegaJ = 50",
              _gamma(_FIT_OMEGA0, 100, fitted=True)),
    "fig2a": ("BLP measure versus omega0 on [0, 50] ms", _scan(50, 0.02, 0.2)),
    "fig2b": ("BLP measure versus omega0 on [0, 100] ms", _scan(100, 0.01, 0.1)),
    "fig2c": ("BLP measure versus omega0 on [0, 200] ms", _scan(200, 0.005, 0.05)),
    "fig3a": ("sigma_z coherence, Markovian omega0 = 0.03",
              _coherence("Z", 0.03, 1, 100)),
    "fig3b": ("sigma_z coherence at omega0 = 0.0314 for alpha = 0.5 and 1.0",
              _coherence("Z", 0.0314, 1, 100, 0.5, "alpha_0.5")
              + _coherence("Z", 0.0314, 1, 100, 1.0, "alpha_1.0")),
    "fig3c": ("sigma_z coherence with four full revivals, omega0 = 0.2514",
              _coherence("Z", 0.2514, 1, 100)),
    "fig4a": ("sigma_x coherence, Markovian, omega_k = 0.005",
              _coherence("X", 0.03, 0.005, 100)),
    "fig4b": ("sigma_x coherence, Markovian, omega_k = 0.0157",
              _coherence("X", 0.03, 0.0157, 100)),
    "fig4c": ("sigma_x coherence, Markovian, omega_k = 0.05",
              _coherence("X", 0.03, 0.05, 100)),
    "fig4d": ("sigma_x coherence, Markovian, omega_k = 0.3",
              _coherence("X", 0.03, 0.3, 100)),
    "fig5a": ("sigma_x coherence, non-Markovian, omega_k = 0.0157",
              _coherence("X", 0.2514, 0.0157, 100)),
    "fig5b": ("sigma_x coherence, resonant omega_k = 0.1257",
              _coherence("X", 0.2514, 0.1257, 100)),
    "fig5c": ("sigma_x coherence, mismatched omega_k = 0.3",
              _coherence("X", 0.2514, 0.3, 100)),
    "fig6a": ("long-time average and alpha_crit versus omega_k at omega0 = 0.03",
              _longterm("0.03", "0.05, 0.13, 0.5, 1.0")),
    "fig6b": ("long-time average and alpha_crit versus omega0 at omega_k = 0.1258",
              _longterm("0.03, 0.07, 0.1, 0.5", "0.1258")),
    "figA1a": ("Gamma(t) on [0, 200] ms for omega0 = n 0.06285/2, n = 0.5, 1, 3, 4",
               _gamma("0.0157125, 0.031425, 0.094275, 0.1257", 200)),
    "figA1b": ("Gamma(t) on [0, 300] ms for omega0 = n 0.06285/3, n = 1..4",
               _gamma("0.02095, 0.0419, 0.06285, 0.0838", 300)),
    "figA3a": ("sigma_z revivals on [0, 50] ms, omega0 = 0.3771",
               _coherence("Z", 0.3771, 1, 50)),
    "figA3b": ("sigma_z revivals on [0, 200] ms, omega0 = 0.0943",
               _coherence("Z", 0.0943, 1, 200)),
    "figA4a": ("sigma_x full revivals on [0, 50] ms, omega0 = 0.3771, omega_k = 0.1885",
               _coherence("X", 0.3771, 0.1885, 50)),
    "figA4b": ("sigma_x full revivals on [0, 200] ms, omega0 = 0.0943, omega_k = 0.0471",
               _coherence("X", 0.0943, 0.0471, 200)),
}
for _panel, _wj in zip("abcdef", (100, 200, 500, 1000, 2000, 4000)):
    PRESETS[f"figA2{_panel}"] = (f"exact versus fitted Gamma(t), omegaJ = {_wj}",
                                 _gamma(_FIT_OMEGA0, 100, fitted=True, omegaJ=_wj))


def preset_names():
    return sorted(PRESETS, key=lambda s: (len(s) > 5, s))


def preset_text(name):
    try:
        return PRESETS[name][1].lstrip()
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(preset_names())}",
                          field="preset") from None


def preset(name):
    """Configuration of the named preset."""
    return parse_config(preset_text(name))


def preset_params(name):
    """Parameters of the preset's first experiment, e.g. ``preset_params("fig5b")["omega0"]``."""
    return dict(preset(name).experiments[0].params)
