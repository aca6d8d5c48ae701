"""
Ablation Registry

Layer-by-layer variants of the attention network. Each entry lists the
ModelConfig fields that differ from the full architecture.
"""

FULL_ARCHITECTURE = 'full'

# Ordered as the expansion / attention / classifier / minor panels
ABLATIONS = {
    'fully-connected': {},
    'conv1d': {'expansion': 'conv1d-k3'},
    'frozen-fc': {'expansion': 'frozen-dense'},
    'no-expansion': {'expansion': 'none'},
    'raffel-attention': {'attention': 'raffel'},
    'temporal-sum': {'attention': 'temporal-sum'},
    'small-classifier': {'classifier': 'small'},
    'no-classifier': {'classifier': 'none'},
    'no-layernorm': {'layernorm': False},
    'relu': {'activation': 'relu'},
}

# Named suites for `semg ablate --suite`
ABLATION_SUITES = {
    'table3': tuple(ABLATIONS),
    'expansion': ('fully-connected', 'conv1d', 'frozen-fc', 'no-expansion'),
    'attention': ('fully-connected', 'raffel-attention', 'temporal-sum'),
    'classifier': ('fully-connected', 'small-classifier', 'no-classifier'),
    'minor': ('fully-connected', 'no-layernorm', 'relu'),
}
