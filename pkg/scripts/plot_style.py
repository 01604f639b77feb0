import matplotlib
import matplotlib.pyplot as plt

matplotlib.rcParams["pdf.fonttype"] = 42
matplotlib.rcParams["ps.fonttype"] = 42
matplotlib.rcParams["font.size"] = 7

plt.rcParams["xtick.major.pad"] = "2"
plt.rcParams["ytick.major.pad"] = "2"
plt.rcParams["xtick.major.size"] = "3"
plt.rcParams["ytick.major.size"] = "3"
plt.rcParams["axes.labelpad"] = "1"
plt.rcParams.update({"mathtext.default": "regular"})

# unit: inch
DOUBLE_COLUMN_WIDTH = 7
COLUMN_SEP = 0.33
SINGLE_COLUMN_WIDTH = (DOUBLE_COLUMN_WIDTH - COLUMN_SEP) / 2

LINEWIDTH = 1

color_map = {
    "u": "0",
    "w": "0.55",
}

line_style_map = {
    "u": "-",
    "w": "--",
}

labels_map = {
    "u": "predators $\\int u$",
    "w": "preys $\\int w$",
}
