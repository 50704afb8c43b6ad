from amt.cli import entry

entry()
