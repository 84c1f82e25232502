"""mml: a small ML-family language toolchain for the open world.

Compile-time providers project external data sources and JavaScript
declaration files into the type system; provided members erase to
runtime-library calls; async blocks desugar to builder operations; whole
modules run on a reference interpreter or translate to JavaScript over a
small runtime shim.
"""

__version__ = "0.1.0"
