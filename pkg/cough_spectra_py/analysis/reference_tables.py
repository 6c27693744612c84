"""
Published per-group reference statistics for voiced cough, unvoiced cough and
speech frames (512-sample frames, 50% overlap, 22050 Hz).

These numbers describe a private recording corpus. They are display context
for `compare --paper-ranges`, never expectations about user audio.
"""

from cough_spectra_py.analysis.stats import STAT_NAMES


REFERENCE_GROUPS = ('cough_voiced', 'cough_unvoiced', 'speech')

ATTRIBUTE_TITLES = {
    'rolloff': 'Spectral Roll-off (in Hz)',
    'entropy': 'Spectral Entropy',
    'flatness': 'Spectral Flatness',
    'flux': 'Spectral Flux',
    'zcr': 'Zero Crossing Rate',
    'centroid': 'Spectral Centroid (Hz)',
    'bandwidth': 'Spectral Bandwidth (Hz)',
}

# columns: min, max, mean, p25 (med_25), median, p75 (med_75), std
_ROWS = {
    'cough_voiced': {
        'rolloff': (1378, 9216, 4451, 2670, 4392, 5943, 1949),
        'entropy': (0, 1, 0.067, 0.001, 0.005, 0.021, 0.174),
        'flatness': (0, 0.047, 0.012, 0.003, 0.01, 0.018, 0.011),
        'flux': (0, 1, 0.409, 0.293, 0.402, 0.551, 0.225),
        'zcr': (0.025, 0.225, 0.1, 0.061, 0.086, 0.131, 0.046),
        'centroid': (1045, 3996, 2154, 1542, 2122, 2619, 700),
        'bandwidth': (1273, 3605, 2286, 1864, 2276, 2680, 527),
    },
    'cough_unvoiced': {
        'rolloff': (1808, 9819, 5705, 4392, 5555, 7321, 1961),
        'entropy': (0, 1, 0.079, 0.003, 0.023, 0.076, 0.15),
        'flatness': (0, 0.221, 0.057, 0.009, 0.036, 0.094, 0.057),
        'flux': (0, 1, 0.438, 0.324, 0.45, 0.552, 0.222),
        'zcr': (0.035, 0.51, 0.222, 0.144, 0.230, 0.305, 0.097),
        'centroid': (907, 5397, 3124, 2473, 3229, 3730, 917),
        'bandwidth': (1307, 3760, 2348, 1807, 2470, 2792, 574),
    },
    'speech': {
        'rolloff': (861, 3445, 1770, 1335, 1636, 2153, 597),
        'entropy': (0, 1, 0.062, 0, 0, 0.01, 0.18),
        'flatness': (0, 0, 0, 0, 0, 0, 0),
        'flux': (0.0, 1, 0.304, 0.148, 0.258, 0.44, 0.221),
        'zcr': (0.02, 0.102, 0.060, 0.051, 0.06, 0.07, 0.016),
        'centroid': (583, 1626, 1019, 867, 994, 1152, 221),
        'bandwidth': (381, 1349, 745, 565, 719, 874, 218),
    },
}

REFERENCE_TABLES: dict[str, dict[str, dict[str, float]]] = {
    group: {
        attribute: dict(zip(STAT_NAMES, row))
        for attribute, row in rows.items()
    }
    for group, rows in _ROWS.items()
}


def reference_value(group: str, attribute: str, statistic: str) -> float:
    """Look up one published statistic, e.g. ('speech', 'centroid', 'mean') -> 1019."""
    return REFERENCE_TABLES[group][attribute][statistic]
