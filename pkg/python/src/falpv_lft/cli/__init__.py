from falpv_lft.cli.app import main as main
