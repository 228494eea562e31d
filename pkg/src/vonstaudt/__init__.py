"""Matroid representability toolkit and von Staudt gadget compiler."""
