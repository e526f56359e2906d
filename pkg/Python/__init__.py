# Kunz workbench
# Frobenius and Kähler differentials of finitely presented F_p-algebras
