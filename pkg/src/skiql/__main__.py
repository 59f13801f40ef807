from skiql.cli import main

main()
