# Makes the `src` directory a package so tools can resolve imports like `src.utils`.
