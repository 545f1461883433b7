"""Cut-layer placement and server compute allocation for U-shaped parallel split learning."""
