# Decohere package
